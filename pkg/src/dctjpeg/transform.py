"""8x8 two-dimensional DCT.

Two implementations live here on purpose. ``dct2_direct``/``idct2_direct``
evaluate the quadruple cosine sums literally and serve as the reference;
``dct2_fast``/``idct2_fast`` use the separable row/column factorisation
with a precomputed basis table and operate on whole stacks of blocks.
"""
from __future__ import annotations

import math

import numpy as np

N = 8


def _c(k: int) -> float:
    return 1.0 / math.sqrt(2.0) if k == 0 else 1.0


def _check(block) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (N, N):
        raise ValueError(f"expected an 8x8 block, got shape {block.shape}")
    return block


def dct2_direct(block) -> np.ndarray:
    f = _check(block).tolist()
    out = np.empty((N, N))
    for u in range(N):
        for v in range(N):
            total = 0.0
            for x in range(N):
                cx = math.cos(math.pi * (2 * x + 1) * u / (2 * N))
                row = f[x]
                for y in range(N):
                    total += row[y] * cx * math.cos(math.pi * (2 * y + 1) * v / (2 * N))
            out[u, v] = 2.0 / N * _c(u) * _c(v) * total
    return out


def idct2_direct(coeffs) -> np.ndarray:
    F = _check(coeffs).tolist()
    out = np.empty((N, N))
    for x in range(N):
        for y in range(N):
            total = 0.0
            for u in range(N):
                cx = _c(u) * math.cos(math.pi * (2 * x + 1) * u / (2 * N))
                row = F[u]
                for v in range(N):
                    total += (cx * _c(v) * row[v]
                              * math.cos(math.pi * (2 * y + 1) * v / (2 * N)))
            out[x, y] = 2.0 / N * total
    return out


def _basis() -> np.ndarray:
    # row k holds sqrt(2/N) * C(k) * cos(pi (2x+1) k / 2N); orthonormal
    k = np.arange(N)[:, None]
    x = np.arange(N)[None, :]
    table = np.sqrt(2.0 / N) * np.cos(np.pi * (2 * x + 1) * k / (2 * N))
    table[0] /= np.sqrt(2.0)
    table.setflags(write=False)
    return table


BASIS = _basis()
_BASIS_T = np.ascontiguousarray(BASIS.T)


def dct2_fast(blocks) -> np.ndarray:
    """Forward DCT of one (8, 8) block or a stack of shape (..., 8, 8)."""
    blocks = np.asarray(blocks, dtype=np.float64)
    if blocks.shape[-2:] != (N, N):
        raise ValueError(f"expected trailing 8x8 dimensions, got {blocks.shape}")
    # 1-D transform along rows, then along columns
    return BASIS @ (blocks @ _BASIS_T)


def idct2_fast(coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-2:] != (N, N):
        raise ValueError(f"expected trailing 8x8 dimensions, got {coeffs.shape}")
    return _BASIS_T @ (coeffs @ BASIS)
