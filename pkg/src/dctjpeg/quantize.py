"""Quantization tables, quality scaling and (de)quantization of coefficient blocks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rounding import round_half_away

LUMINANCE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int32,
)

CHROMINANCE = np.full((8, 8), 99, dtype=np.int32)
CHROMINANCE[:4, :4] = [
    [17, 18, 24, 47],
    [18, 21, 26, 66],
    [24, 26, 56, 99],
    [47, 66, 99, 99],
]

for _t in (LUMINANCE, CHROMINANCE):
    _t.setflags(write=False)


@dataclass(frozen=True, eq=False)
class QuantTable:
    divisors: np.ndarray
    role: str = "luminance"

    def __post_init__(self):
        d = np.array(self.divisors, dtype=np.int32)
        if d.shape != (8, 8):
            raise ValueError(f"quantization table must be 8x8, got {d.shape}")
        if d.min() < 1 or d.max() > 255:
            raise ValueError("divisors must lie in [1, 255]")
        if self.role not in ("luminance", "chrominance"):
            raise ValueError(f"unknown table role {self.role!r}")
        d.setflags(write=False)
        object.__setattr__(self, "divisors", d)

    def __eq__(self, other):
        if not isinstance(other, QuantTable):
            return NotImplemented
        return self.role == other.role and bool(np.array_equal(self.divisors, other.divisors))


def default_table(role: str) -> QuantTable:
    return QuantTable(LUMINANCE if role == "luminance" else CHROMINANCE, role)


def scaled_table(base: QuantTable, quality: int) -> QuantTable:
    """Scale ``base`` by the usual 5000/q (below 50) or 200-2q (from 50) factor.

    quality=50 returns the base divisors unchanged; quality=100 gives all ones.
    """
    if not isinstance(quality, (int, np.integer)) or not 1 <= quality <= 100:
        raise ValueError(f"quality must be an integer in [1, 100], got {quality!r}")
    scale = 5000 // quality if quality < 50 else 200 - 2 * quality
    # the +50 makes the integer division round base*scale/100 to nearest
    divisors = (base.divisors.astype(np.int64) * scale + 50) // 100
    return QuantTable(np.clip(divisors, 1, 255), base.role)


def quantize_block(coeffs, table: QuantTable) -> np.ndarray:
    """Divide by the table and round half away from zero. Accepts (..., 8, 8) stacks."""
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / table.divisors).astype(np.int32)


def dequantize_block(q, table: QuantTable) -> np.ndarray:
    return np.asarray(q, dtype=np.float64) * table.divisors
