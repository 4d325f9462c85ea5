"""Scan kernel dispatch: the compiled extension when it was built, else pure Python."""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def backend() -> str:
    return _active.BACKEND


def use_backend(name: str) -> None:
    """Switch the kernels used by the codec ("cython" or "python")."""
    global _active
    try:
        _active = BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def count_symbols(*args):
    return _active.count_symbols(*args)


def encode_scan(*args):
    return _active.encode_scan(*args)


def decode_scan(*args):
    return _active.decode_scan(*args)
