import numpy as np


def round_half_away(x):
    """Round to nearest integer, ties away from zero. Works on scalars and arrays."""
    if np.ndim(x) == 0:
        x = float(x)
        return int(np.copysign(np.floor(abs(x) + 0.5), x))
    x = np.asarray(x, dtype=np.float64)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)
