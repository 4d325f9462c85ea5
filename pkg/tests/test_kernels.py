import numpy as np
import pytest

from dctjpeg import _kernels
from dctjpeg.entropy import (CoefficientSymbol, bit_encode, build_huffman_lengths,
                             canonicalize, decode_arrays, dc_differential, encode_arrays,
                             runlength_encode)
from dctjpeg.errors import JpegError


def random_zz(rng, n, density=0.2):
    zz = rng.integers(-60, 61, size=(n, 64)).astype(np.int32)
    zz[:, 1:] *= rng.random((n, 63)) < density
    zz[:, 0] = rng.integers(-1000, 1000, size=n)
    return np.ascontiguousarray(zz)


def reference_symbols(zz):
    """Reference ops: DC differential then run-length, one component."""
    out = []
    for block, diff in zip(zz.tolist(), dc_differential(zz[:, 0].tolist())):
        out.append(CoefficientSymbol.dc(diff))
        out.extend(runlength_encode(block[1:]))
    return out


def shared_spec(symbols):
    freqs = {}
    for s in symbols:
        freqs[s.symbol] = freqs.get(s.symbol, 0) + 1
    return canonicalize(build_huffman_lengths(freqs))


def single_table_args(n):
    zero = np.zeros(n, dtype=np.int32)
    return zero, zero, zero


@pytest.mark.parametrize("density", [0.0, 0.05, 0.3, 1.0])
def test_encode_matches_reference(backend, rng, density):
    zz = random_zz(rng, 40, density)
    symbols = reference_symbols(zz)
    spec = shared_spec(symbols)
    comp, dc, ac = single_table_args(len(zz))
    arrays = encode_arrays([spec])
    got = _kernels.encode_scan(zz, comp, dc, ac, *arrays, *arrays)
    assert bytes(got) == bit_encode(symbols, spec)


def test_count_matches_reference(backend, rng):
    zz = random_zz(rng, 60)
    comp, dc, ac = single_table_args(len(zz))
    dc_freq, ac_freq = _kernels.count_symbols(zz, comp, dc, ac, 1)
    symbols = reference_symbols(zz)
    want_dc = np.bincount([s.symbol for s in symbols if s.kind == "DC"], minlength=256)
    want_ac = np.bincount([s.symbol for s in symbols if s.kind == "AC"], minlength=256)
    assert np.array_equal(dc_freq[0], want_dc)
    assert np.array_equal(ac_freq[0], want_ac)


def test_decode_inverts_encode(backend, rng):
    zz = random_zz(rng, 50)
    spec = shared_spec(reference_symbols(zz))
    comp, dc, ac = single_table_args(len(zz))
    arrays = encode_arrays([spec])
    data = bytes(_kernels.encode_scan(zz, comp, dc, ac, *arrays, *arrays))
    tables = decode_arrays([spec])
    out = _kernels.decode_scan(data, 0, len(data), 0, comp, dc, ac, 1, tables, tables, 0)
    assert np.array_equal(out, zz)


def test_backends_agree(rng):
    if len(_kernels.BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    zz = random_zz(rng, 300)
    comp = np.tile(np.array([0, 1, 2], dtype=np.int32), 100)
    tab = np.minimum(comp, 1).astype(np.int32)
    py, cy = _kernels.BACKENDS["python"], _kernels.BACKENDS["cython"]
    fp, fc = py.count_symbols(zz, comp, tab, tab, 2), cy.count_symbols(zz, comp, tab, tab, 2)
    assert all(np.array_equal(a, b) for a, b in zip(fp, fc))
    specs_dc = [canonicalize(build_huffman_lengths(
        {s: int(n) for s, n in enumerate(fp[0][t]) if n})) for t in range(2)]
    specs_ac = [canonicalize(build_huffman_lengths(
        {s: int(n) for s, n in enumerate(fp[1][t]) if n})) for t in range(2)]
    enc = (*encode_arrays(specs_dc), *encode_arrays(specs_ac))
    a = bytes(py.encode_scan(zz, comp, tab, tab, *enc))
    b = bytes(cy.encode_scan(zz, comp, tab, tab, *enc))
    assert a == b
    dec = (decode_arrays(specs_dc), decode_arrays(specs_ac))
    ra = py.decode_scan(a, 0, len(a), 0, comp, tab, tab, 3, *dec, 0)
    rb = cy.decode_scan(a, 0, len(a), 0, comp, tab, tab, 3, *dec, 0)
    assert np.array_equal(ra, zz) and np.array_equal(rb, zz)


def test_decode_errors_are_positioned(backend, rng):
    zz = random_zz(rng, 20)
    spec = shared_spec(reference_symbols(zz))
    comp, dc, ac = single_table_args(len(zz))
    arrays = encode_arrays([spec])
    data = bytes(_kernels.encode_scan(zz, comp, dc, ac, *arrays, *arrays))
    tables = decode_arrays([spec])
    cut = data[: len(data) // 2]
    with pytest.raises(JpegError) as info:
        _kernels.decode_scan(cut, 0, len(cut), 100, comp, dc, ac, 1, tables, tables, 0)
    assert info.value.offset is not None and info.value.offset >= 100


def test_oversized_amplitude_rejected(backend):
    zz = np.zeros((1, 64), dtype=np.int32)
    zz[0, 5] = 4096
    comp, dc, ac = single_table_args(1)
    with pytest.raises(ValueError):
        _kernels.count_symbols(zz, comp, dc, ac, 1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")
