import heapq
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dctjpeg.entropy import (EOB, ZIGZAG, ZRL, BitReader, CoefficientSymbol, HuffmanSpec,
                             amplitude_bits, amplitude_value, bit_decode, bit_encode,
                             build_huffman_lengths, canonicalize, dc_differential,
                             inverse_zigzag, kraft_units, limit_lengths, runlength_decode,
                             runlength_encode, zigzag_scan)
from dctjpeg.errors import JpegError


def walk_zigzag():
    """Independent zigzag: bounce along anti-diagonals one step at a time."""
    r = c = 0
    order = []
    up = True
    for _ in range(64):
        order.append(r * 8 + c)
        if up:
            if c == 7:
                r, up = r + 1, False
            elif r == 0:
                c, up = c + 1, False
            else:
                r, c = r - 1, c + 1
        else:
            if r == 7:
                c, up = c + 1, True
            elif c == 0:
                r, up = r + 1, True
            else:
                r, c = r + 1, c - 1
    return order


def test_zigzag_matches_walker():
    assert ZIGZAG.tolist() == walk_zigzag()


def test_zigzag_examples():
    block = np.arange(64).reshape(8, 8)
    assert zigzag_scan(block)[:8].tolist() == [0, 1, 8, 16, 9, 2, 3, 10]
    assert (zigzag_scan(np.full((8, 8), 7)) == 7).all()
    inv = inverse_zigzag(np.arange(64))
    assert (inv[0, 0], inv[0, 1], inv[1, 0]) == (0, 1, 2)
    assert not inverse_zigzag(np.zeros(64)).any()


def test_zigzag_inverse_pair(rng):
    blocks = rng.integers(-1024, 1024, size=(100, 8, 8))
    assert np.array_equal(inverse_zigzag(zigzag_scan(blocks)), blocks)
    seqs = rng.integers(-5, 5, size=(100, 64))
    assert np.array_equal(zigzag_scan(inverse_zigzag(seqs)), seqs)


def test_dc_differential_examples():
    assert dc_differential([50, 52, 52, 47]) == [50, 2, 0, -5]
    assert dc_differential([50, 2, 0, -5], "decode") == [50, 52, 52, 47]
    with pytest.raises(ValueError):
        dc_differential([])


@given(st.lists(st.integers(-2047, 2047), min_size=1, max_size=50))
def test_dc_round_trip(values):
    assert dc_differential(dc_differential(values), "decode") == values


@pytest.mark.parametrize("value, size, bits", [
    (5, 3, 0b101), (-3, 2, 0b00), (-1, 1, 0), (1, 1, 1), (-5, 3, 0b010), (1023, 10, 1023),
])
def test_amplitude_ones_complement(value, size, bits):
    assert amplitude_bits(value, size) == bits
    assert amplitude_value(bits, size) == value


def test_runlength_examples():
    assert runlength_encode([0] * 63) == [EOB]
    assert runlength_encode([5, 0, 0, -3] + [0] * 59) == [
        CoefficientSymbol("AC", 0, 3, 5), CoefficientSymbol("AC", 2, 2, -3), EOB]
    assert runlength_encode([0] * 17 + [1] + [0] * 45) == [
        ZRL, CoefficientSymbol("AC", 1, 1, 1), EOB]


def test_runlength_no_eob_when_last_nonzero():
    ac = [0] * 62 + [4]
    syms = runlength_encode(ac)
    assert syms[-1].amplitude == 4 and EOB not in syms
    assert runlength_decode(syms) == ac


def test_runlength_errors():
    with pytest.raises(ValueError):
        runlength_encode([2048] + [0] * 62)
    with pytest.raises(ValueError):
        runlength_encode([0] * 64)
    with pytest.raises(JpegError):
        runlength_decode([ZRL] * 4)
    with pytest.raises(JpegError):
        runlength_decode([ZRL] * 3 + [CoefficientSymbol("AC", 15, 1, 1)])
    with pytest.raises(JpegError):
        runlength_decode([CoefficientSymbol("AC", 0, 1, 1)])
    assert runlength_decode([EOB]) == [0] * 63


sparse_ac = st.lists(
    st.one_of(st.just(0), st.just(0), st.just(0), st.integers(-2047, 2047)),
    min_size=63, max_size=63)


@given(sparse_ac)
def test_runlength_round_trip(ac):
    assert runlength_decode(runlength_encode(ac)) == ac


# -- Huffman ------------------------------------------------------------------

def test_lengths_fixture():
    assert build_huffman_lengths({"a": 5, "b": 2, "c": 1, "d": 1}) == \
        {"a": 1, "b": 2, "c": 3, "d": 3}
    assert build_huffman_lengths({"x": 1000, "y": 1}) == {"x": 1, "y": 1}
    assert build_huffman_lengths(dict.fromkeys("abcd", 3)) == dict.fromkeys("abcd", 2)
    assert build_huffman_lengths({"z": 9}) == {"z": 1}
    with pytest.raises(ValueError):
        build_huffman_lengths({})


def test_fixture_is_minimal_by_brute_force():
    freqs = [5, 2, 1, 1]
    best = min(
        sum(f * n for f, n in zip(freqs, lengths))
        for lengths in itertools.product(range(1, 5), repeat=4)
        if sum(2.0 ** -n for n in lengths) <= 1
    )
    got = build_huffman_lengths(dict(zip("abcd", freqs)))
    assert best == 15
    assert sum(f * got[s] for s, f in zip("abcd", freqs)) == 15


def optimal_cost(counts):
    """Total weighted length of an optimal prefix code: sum of merged weights."""
    heap = list(counts)
    heapq.heapify(heap)
    cost = 0
    while len(heap) > 1:
        merged = heapq.heappop(heap) + heapq.heappop(heap)
        cost += merged
        heapq.heappush(heap, merged)
    return cost


def is_prefix_free(codes):
    words = [format(code, f"0{n}b") for n, code in codes.values()]
    return not any(a != b and b.startswith(a) for a in words for b in words)


def test_random_tables(rng):
    for _ in range(200):
        k = int(rng.integers(2, 40))
        counts = rng.integers(1, 1000, size=k)
        freqs = dict(enumerate(counts.tolist()))
        lengths = build_huffman_lengths(freqs)
        spec = canonicalize(lengths)
        assert is_prefix_free(spec.codes)
        assert kraft_units(spec.lengths.values(), 16) <= 1 << 16
        total = counts.sum()
        avg = sum(freqs[s] * spec.lengths[s] for s in freqs) / total
        entropy = -sum(c / total * math.log2(c / total) for c in counts)
        assert entropy - 1e-12 <= avg < entropy + 1
        assert sum(freqs[s] * lengths[s] for s in freqs) == optimal_cost(counts.tolist())


def test_canonical_examples():
    spec = canonicalize({"a": 1, "b": 2, "c": 3, "d": 3})
    assert {s: format(c, f"0{n}b") for s, (n, c) in spec.codes.items()} == \
        {"a": "0", "b": "10", "c": "110", "d": "111"}
    assert canonicalize({"q": 1}).codes == {"q": (1, 0)}
    with pytest.raises(ValueError):
        canonicalize({"a": 1, "b": 1, "c": 1})


def test_depth_limit():
    fib = [1, 1]
    while len(fib) < 24:
        fib.append(fib[-1] + fib[-2])
    lengths = build_huffman_lengths(dict(enumerate(fib)))
    assert max(lengths.values()) > 16
    spec = canonicalize(lengths)
    assert max(spec.lengths.values()) <= 16
    assert kraft_units(spec.lengths.values(), 16) <= 1 << 16
    assert is_prefix_free(spec.codes)
    limited = limit_lengths({i: 20 for i in range(5)}, 16)
    assert set(limited.values()) == {16}


def test_reserved_symbol_frees_all_ones():
    for freqs in ({1: 1, 2: 1}, {1: 5, 2: 3, 3: 1}, dict.fromkeys(range(7), 2), {0: 9}):
        freqs = dict(freqs)
        freqs[256] = 1
        spec = canonicalize(build_huffman_lengths(freqs), reserved=256)
        assert 256 not in spec.codes
        assert all(code != (1 << n) - 1 for n, code in spec.codes.values())
        assert is_prefix_free(spec.codes)


def test_from_counts_round_trip():
    spec = canonicalize(build_huffman_lengths({0: 10, 1: 7, 5: 2, 17: 2, 240: 1}))
    again = HuffmanSpec.from_counts(spec.counts(), spec.ordered_symbols())
    assert again.codes == spec.codes
    with pytest.raises(JpegError):
        HuffmanSpec.from_counts([3] + [0] * 15, [1, 2, 3])


# -- bit I/O ------------------------------------------------------------------

def test_bit_encode_examples():
    one = canonicalize({"s": 1})
    assert bit_encode(["s"], one) == b"\x7f"
    two = canonicalize({0: 1, 1: 1})
    assert bit_encode([1] * 8, two) == b"\xff\x00"
    assert bit_decode(b"\xff\x00", two) == [1] * 8
    assert bit_decode(b"\x7f", one) == ["s"]


def test_bit_decode_errors():
    spec = canonicalize({"a": 1, "b": 2})  # code 11 unused
    with pytest.raises(JpegError, match="invalid"):
        bit_decode(b"\xff\x00\xff\x00", spec, count=1)
    with pytest.raises(JpegError, match="end"):
        bit_decode(b"\x00", spec, count=9)
    with pytest.raises(JpegError, match="marker"):
        bit_decode(b"\x00\xff\xd9", spec, count=12)


def test_bit_reader_restart_marker():
    reader = BitReader(b"\x80\xff\xd0\x40")
    assert reader.read_bit() == 1
    reader.align()
    reader.expect_marker(0xD0)
    assert reader.read_bits(2) == 0b01


coef_streams = st.lists(
    st.tuples(st.integers(0, 15), st.integers(-1023, 1023)), min_size=1, max_size=80)


@settings(max_examples=80, deadline=None)
@given(coef_streams)
def test_coefficient_bit_round_trip(items):
    syms = [CoefficientSymbol("AC", run, abs(a).bit_length(), a) for run, a in items]
    freqs = {}
    for s in syms:
        freqs[s.symbol] = freqs.get(s.symbol, 0) + 1
    spec = canonicalize(build_huffman_lengths(freqs))
    data = bit_encode(syms, spec)
    assert bit_decode(data, spec, count=len(syms), kind="AC") == syms


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=200))
def test_bare_symbol_round_trip(symbols):
    freqs = {}
    for s in symbols:
        freqs[s] = freqs.get(s, 0) + 1
    spec = canonicalize(build_huffman_lengths(freqs))
    assert bit_decode(bit_encode(symbols, spec), spec, count=len(symbols)) == symbols
