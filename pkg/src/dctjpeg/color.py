"""RGB <-> YCbCr conversion and the +/-128 level shift.

The forward matrix uses the three-decimal coefficients exactly as printed in
the source material. Its Cb row sums to -0.003, so pure white maps to
Cb = 127 instead of 128; the inverse is obtained numerically from the same
matrix rather than taken from a standard.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rounding import round_half_away

FORWARD = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.169, -0.334, 0.500],
        [0.500, -0.419, -0.081],
    ]
)
OFFSET = np.array([0.0, 128.0, 128.0])


def _invert(matrix: np.ndarray) -> np.ndarray:
    # Gauss-Jordan elimination with partial pivoting
    n = matrix.shape[0]
    aug = np.hstack([matrix.astype(np.float64), np.eye(n)])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if aug[pivot, col] == 0.0:
            raise ValueError("matrix is singular")
        aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:]


@dataclass(frozen=True)
class ColorMatrix:
    forward: np.ndarray = field(default_factory=lambda: FORWARD.copy())
    offset: np.ndarray = field(default_factory=lambda: OFFSET.copy())

    def __post_init__(self):
        object.__setattr__(self, "inverse", _invert(self.forward))


YCBCR = ColorMatrix()


def _clamp8(values):
    return np.clip(values, 0, 255)


def rgb_planes_to_ycbcr(rgb: np.ndarray, matrix: ColorMatrix = YCBCR) -> np.ndarray:
    """Convert (3, H, W) RGB planes to (3, H, W) uint8 YCbCr planes."""
    flat = np.asarray(rgb, dtype=np.float64).reshape(3, -1)
    out = matrix.forward @ flat + matrix.offset[:, None]
    return _clamp8(round_half_away(out)).astype(np.uint8).reshape(np.shape(rgb))


def ycbcr_planes_to_rgb(ycc: np.ndarray, matrix: ColorMatrix = YCBCR) -> np.ndarray:
    flat = np.asarray(ycc, dtype=np.float64).reshape(3, -1) - matrix.offset[:, None]
    out = matrix.inverse @ flat
    return _clamp8(round_half_away(out)).astype(np.uint8).reshape(np.shape(ycc))


def rgb_to_ycbcr(r: int, g: int, b: int) -> tuple[int, int, int]:
    y, cb, cr = rgb_planes_to_ycbcr(np.array([r, g, b]).reshape(3, 1, 1)).ravel()
    return int(y), int(cb), int(cr)


def ycbcr_to_rgb(y: int, cb: int, cr: int) -> tuple[int, int, int]:
    r, g, b = ycbcr_planes_to_rgb(np.array([y, cb, cr]).reshape(3, 1, 1)).ravel()
    return int(r), int(g), int(b)


def level_shift(plane, direction: str = "forward") -> np.ndarray:
    """Center samples on zero (``forward``) or undo it with clamping (``inverse``)."""
    plane = np.asarray(plane)
    if direction == "forward":
        return plane.astype(np.int32) - 128
    if direction == "inverse":
        return _clamp8(plane.astype(np.int64) + 128).astype(np.uint8)
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")
