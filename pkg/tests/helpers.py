"""Synthetic test images."""
import numpy as np

from dctjpeg.image import RasterImage


def random_image(rng, height, width, channels=1) -> RasterImage:
    return RasterImage(rng.integers(0, 256, size=(channels, height, width), dtype=np.uint8))


def smooth_image(rng, height, width, channels=1) -> RasterImage:
    """Low-frequency random image, closer to natural content than white noise."""
    y, x = np.mgrid[0:height, 0:width] / max(height, width)
    planes = []
    for _ in range(channels):
        acc = np.zeros((height, width))
        for _ in range(6):
            fx, fy = rng.uniform(0.5, 6, size=2)
            acc += rng.uniform(10, 40) * np.sin(2 * np.pi * (fx * x + fy * y) + rng.uniform(0, 6))
        planes.append(np.clip(acc + 128, 0, 255))
    return RasterImage(np.round(planes).astype(np.uint8))
