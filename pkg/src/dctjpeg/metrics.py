"""Compression ratio, mean squared error and PSNR."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .image import RasterImage

PEAK = 255.0


def compression_ratio(n1: int, n2: int) -> float:
    """Original size over compressed size."""
    if n2 == 0:
        raise ZeroDivisionError("compressed size must be positive")
    return n1 / n2


def _check_shapes(x: RasterImage, y: RasterImage) -> None:
    if x.planes.shape != y.planes.shape:
        raise ValueError(
            f"image shapes differ: {x.width}x{x.height}x{x.channels} vs "
            f"{y.width}x{y.height}x{y.channels}"
        )


def mse(x: RasterImage, y: RasterImage) -> float:
    """Mean squared sample difference, averaged over every channel plane."""
    _check_shapes(x, y)
    diff = x.planes.astype(np.int64) - y.planes.astype(np.int64)
    # exact integer sum, one division
    return float(np.sum(diff * diff)) / diff.size


def psnr_from_mse(value: float) -> float:
    if value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / value)


def psnr(x: RasterImage, y: RasterImage) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    return psnr_from_mse(mse(x, y))


@dataclass
class QualityReport:
    n1: int
    n2: int
    cr: float
    mse: float
    psnr: float

    @classmethod
    def measure(cls, original: RasterImage, decoded: RasterImage, compressed_size: int):
        n1 = original.channels * original.width * original.height
        err = mse(original, decoded)
        return cls(n1, compressed_size, compression_ratio(n1, compressed_size), err,
                   psnr_from_mse(err))

    def to_text(self) -> str:
        return "\n".join(f"{k}={_fmt(v)}" for k, v in asdict(self).items())

    def to_json(self) -> str:
        # JSON has no infinity literal
        return json.dumps({k: "inf" if isinstance(v, float) and math.isinf(v) else v
                           for k, v in asdict(self).items()})


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.6f}"
    return str(value)
