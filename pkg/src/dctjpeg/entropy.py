"""Zigzag ordering, coefficient symbolization, Huffman codes and bit-level I/O."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import JpegError

MAX_CODE_LENGTH = 16


def _zigzag_order() -> np.ndarray:
    order = []
    for s in range(15):
        rows = range(max(0, s - 7), min(s, 7) + 1)
        if s % 2 == 0:
            rows = reversed(rows)
        order.extend(r * 8 + (s - r) for r in rows)
    return np.array(order, dtype=np.intp)


# ZIGZAG[k] is the row-major index of the k-th scanned coefficient
ZIGZAG = _zigzag_order()
UNZIGZAG = np.argsort(ZIGZAG)
ZIGZAG.setflags(write=False)
UNZIGZAG.setflags(write=False)


def zigzag_scan(block) -> np.ndarray:
    """Flatten an 8x8 block (or a stack of them) into zigzag order."""
    block = np.asarray(block)
    if block.shape[-2:] != (8, 8):
        raise ValueError(f"expected 8x8 block, got shape {block.shape}")
    return block.reshape(block.shape[:-2] + (64,))[..., ZIGZAG]


def inverse_zigzag(seq) -> np.ndarray:
    seq = np.asarray(seq)
    if seq.shape[-1] != 64:
        raise ValueError(f"expected 64 coefficients, got {seq.shape[-1]}")
    return seq[..., UNZIGZAG].reshape(seq.shape[:-1] + (8, 8))


def dc_differential(values: Sequence[int], direction: str = "encode") -> list[int]:
    values = [int(v) for v in values]
    if not values:
        raise ValueError("DC sequence must not be empty")
    if direction == "encode":
        return [values[0]] + [b - a for a, b in zip(values, values[1:])]
    if direction == "decode":
        out, acc = [], 0
        for d in values:
            acc += d
            out.append(acc)
        return out
    raise ValueError(f"direction must be 'encode' or 'decode', not {direction!r}")


# -- coefficient symbols ------------------------------------------------------

def magnitude_category(value: int) -> int:
    """Number of bits needed for |value| (0 for zero)."""
    return abs(int(value)).bit_length()


def amplitude_bits(value: int, size: int) -> int:
    """Amplitude as stored: negatives use the one's-complement form v + 2**size - 1."""
    return value if value >= 0 else value + (1 << size) - 1


def amplitude_value(bits: int, size: int) -> int:
    if size == 0:
        return 0
    return bits if bits >> (size - 1) else bits - (1 << size) + 1


@dataclass(frozen=True)
class CoefficientSymbol:
    kind: str
    run: int
    size: int
    amplitude: int = 0

    @property
    def symbol(self) -> int:
        """The byte value that gets Huffman coded."""
        return self.size if self.kind == "DC" else (self.run << 4) | self.size

    @classmethod
    def dc(cls, diff: int) -> CoefficientSymbol:
        size = magnitude_category(diff)
        if size > 11:
            raise ValueError(f"DC difference {diff} exceeds the 11-bit category range")
        return cls("DC", 0, size, int(diff))

    @classmethod
    def from_symbol(cls, kind: str, symbol: int, amplitude: int = 0) -> CoefficientSymbol:
        if kind == "DC":
            return cls("DC", 0, symbol, amplitude)
        return cls("AC", symbol >> 4, symbol & 0x0F, amplitude)


EOB = CoefficientSymbol("AC", 0, 0)
ZRL = CoefficientSymbol("AC", 15, 0)


def runlength_encode(ac: Sequence[int]) -> list[CoefficientSymbol]:
    """Turn the 63 AC coefficients of a block into (run, size, amplitude) symbols."""
    if len(ac) != 63:
        raise ValueError(f"expected 63 AC coefficients, got {len(ac)}")
    out = []
    run = 0
    for value in ac:
        value = int(value)
        if value == 0:
            run += 1
            continue
        size = magnitude_category(value)
        if size > 11:
            raise ValueError(f"AC amplitude {value} exceeds the 11-bit category range")
        while run > 15:
            out.append(ZRL)
            run -= 16
        out.append(CoefficientSymbol("AC", run, size, value))
        run = 0
    if run:
        out.append(EOB)
    return out


def runlength_decode(symbols: Iterable[CoefficientSymbol]) -> list[int]:
    out = [0] * 63
    pos = 0
    ended = False
    for sym in symbols:
        if ended:
            raise JpegError("symbols after end-of-block")
        if sym.size == 0:
            if sym.run == 15:
                pos += 16
                if pos > 63:
                    raise JpegError("zero run overflows the 63 AC slots")
            elif sym.run == 0:
                ended = True
            else:
                raise JpegError(f"invalid AC symbol run={sym.run} size=0")
            continue
        pos += sym.run
        if pos >= 63:
            raise JpegError("AC coefficients overflow the 63 slots")
        out[pos] = sym.amplitude
        pos += 1
    if not ended and pos != 63:
        raise JpegError(f"block ended after {pos} AC coefficients without end-of-block")
    return out


# -- Huffman code construction ------------------------------------------------

class _Node:
    __slots__ = ("symbol", "count", "parent", "left", "right")

    def __init__(self, symbol, count, left=None, right=None):
        self.symbol = symbol
        self.count = count
        self.parent = None
        self.left = left
        self.right = right


def build_huffman_lengths(freqs: Mapping) -> dict:
    """Code length per symbol from a frequency table, by repeated lowest-two merging.

    Ties between equal counts go to the node created first, so the result is
    deterministic. A lone symbol gets length 1.
    """
    if not freqs:
        raise ValueError("frequency table is empty")
    for sym, count in freqs.items():
        if count < 1:
            raise ValueError(f"symbol {sym!r} has non-positive count {count}")
    leaves = [_Node(sym, freqs[sym]) for sym in sorted(freqs)]
    if len(leaves) == 1:
        return {leaves[0].symbol: 1}
    heap = [(node.count, order, node) for order, node in enumerate(leaves)]
    heapq.heapify(heap)
    created = len(heap)
    while len(heap) > 1:
        count_a, _, a = heapq.heappop(heap)
        count_b, _, b = heapq.heappop(heap)
        parent = _Node(None, count_a + count_b, a, b)
        a.parent = b.parent = parent
        heapq.heappush(heap, (parent.count, created, parent))
        created += 1
    lengths = {}
    for leaf in leaves:
        depth, node = 0, leaf
        while node.parent is not None:
            node = node.parent
            depth += 1
        lengths[leaf.symbol] = depth
    return lengths


def kraft_units(lengths: Iterable[int], max_length: int) -> int:
    """Kraft sum scaled by 2**max_length, so <= 2**max_length means valid."""
    return sum(1 << (max_length - n) for n in lengths)


def limit_lengths(lengths: Mapping, max_length: int = MAX_CODE_LENGTH) -> dict:
    """Raise overlong leaves to ``max_length`` and lengthen the deepest shorter
    codes until the Kraft inequality holds again."""
    if len(lengths) > 1 << max_length:
        raise ValueError(f"{len(lengths)} symbols cannot fit in {max_length}-bit codes")
    out = {s: min(n, max_length) for s, n in lengths.items()}
    excess = kraft_units(out.values(), max_length) - (1 << max_length)
    # longest codes first: lengthening them costs the least
    order = sorted(out, key=lambda s: (-out[s], s))
    while excess > 0:
        for sym in order:
            if out[sym] < max_length:
                break
        out[sym] += 1
        excess -= 1 << (max_length - out[sym])
        order = sorted(out, key=lambda s: (-out[s], s))
    return out


@dataclass
class HuffmanSpec:
    lengths: dict
    codes: dict = field(default_factory=dict)

    def counts(self) -> list[int]:
        """Number of codes of each length 1..16, as stored in a DHT segment."""
        bits = [0] * MAX_CODE_LENGTH
        for n in self.lengths.values():
            bits[n - 1] += 1
        return bits

    def ordered_symbols(self) -> list:
        return sorted(self.codes, key=lambda s: self.codes[s])

    @classmethod
    def from_counts(cls, counts: Sequence[int], symbols: Sequence) -> HuffmanSpec:
        """Rebuild a spec from DHT counts-per-length and the symbol list."""
        if len(counts) != MAX_CODE_LENGTH or sum(counts) != len(symbols):
            raise JpegError("Huffman counts do not match the symbol list")
        if len(set(symbols)) != len(symbols):
            raise JpegError("duplicate symbol in Huffman table")
        codes = {}
        lengths = {}
        code = 0
        k = 0
        for length, count in enumerate(counts, start=1):
            for _ in range(count):
                if code >= 1 << length:
                    raise JpegError("Huffman table oversubscribed")
                codes[symbols[k]] = (length, code)
                lengths[symbols[k]] = length
                code += 1
                k += 1
            code <<= 1
        return cls(lengths, codes)

    def decode_table(self) -> dict:
        """(length, code) -> symbol lookup."""
        return {code: sym for sym, code in self.codes.items()}


def canonicalize(lengths: Mapping, max_length: int = MAX_CODE_LENGTH,
                 reserved=None) -> HuffmanSpec:
    """Assign canonical codewords in (length, symbol) order.

    Lengths above ``max_length`` are folded down first. If ``reserved`` names a
    placeholder symbol, it is dropped and its slot is taken from the longest
    length, which keeps the all-ones codeword unused.
    """
    if not lengths:
        raise ValueError("no symbols to code")
    for sym, n in lengths.items():
        if n < 1:
            raise ValueError(f"symbol {sym!r} has invalid length {n}")
    deepest = max(lengths.values())
    if kraft_units(lengths.values(), deepest) > 1 << deepest:
        raise ValueError("code lengths violate the Kraft inequality")
    if deepest > max_length:
        lengths = limit_lengths(lengths, max_length)
    lengths = dict(lengths)
    if reserved is not None and reserved in lengths:
        real = sorted((s for s in lengths if s != reserved), key=lambda s: (lengths[s], s))
        if not real:
            raise ValueError("no symbols besides the reserved one")
        # give the real symbols every slot but the longest, shortest first
        slots = sorted(lengths.values())[:-1]
        lengths = dict(zip(real, slots))
    order = sorted(lengths, key=lambda s: (lengths[s], s))
    codes = {}
    code = 0
    prev = lengths[order[0]]
    for sym in order:
        n = lengths[sym]
        code <<= n - prev
        prev = n
        codes[sym] = (n, code)
        code += 1
    return HuffmanSpec(lengths, codes)


# -- bit I/O ------------------------------------------------------------------

class BitWriter:
    """MSB-first bit packer with 0xFF byte stuffing and 1-bit padding."""

    def __init__(self):
        self.out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, nbits: int) -> None:
        if nbits == 0:
            return
        self._acc = (self._acc << nbits) | (value & ((1 << nbits) - 1))
        self._nbits += nbits
        while self._nbits >= 8:
            self._nbits -= 8
            byte = (self._acc >> self._nbits) & 0xFF
            self.out.append(byte)
            if byte == 0xFF:
                self.out.append(0)
        self._acc &= (1 << self._nbits) - 1

    def flush(self) -> bytes:
        if self._nbits:
            pad = 8 - self._nbits
            self.write((1 << pad) - 1, pad)
        return bytes(self.out)


class BitReader:
    """Reads MSB-first bits from stuffed entropy-coded data.

    Offsets in errors are ``base_offset`` plus the position within ``data``.
    """

    def __init__(self, data: bytes, start: int = 0, end: int | None = None,
                 base_offset: int = 0):
        self.data = data
        self.pos = start
        self.end = len(data) if end is None else end
        self.base_offset = base_offset
        self._acc = 0
        self._nbits = 0

    def _fill(self) -> None:
        pos = self.pos
        if pos >= self.end:
            raise JpegError("unexpected end of entropy-coded data", self.base_offset + pos)
        byte = self.data[pos]
        if byte == 0xFF:
            if pos + 1 >= self.end:
                raise JpegError("unexpected end of entropy-coded data",
                                self.base_offset + pos + 1)
            if self.data[pos + 1] != 0:
                raise JpegError(f"unexpected marker 0xFF{self.data[pos + 1]:02X} in entropy-coded data",
                                self.base_offset + pos)
            pos += 1
        self.pos = pos + 1
        self._acc = (self._acc << 8) | byte
        self._nbits += 8

    def read_bit(self) -> int:
        if not self._nbits:
            self._fill()
        self._nbits -= 1
        return (self._acc >> self._nbits) & 1

    def read_bits(self, n: int) -> int:
        while self._nbits < n:
            self._fill()
        self._nbits -= n
        value = (self._acc >> self._nbits) & ((1 << n) - 1)
        self._acc &= (1 << self._nbits) - 1
        return value

    def align(self) -> None:
        self._acc = 0
        self._nbits = 0

    def expect_marker(self, marker: int) -> None:
        pos = self.pos
        if pos + 1 >= self.end or self.data[pos] != 0xFF or self.data[pos + 1] != marker:
            raise JpegError(f"expected marker 0xFF{marker:02X}", self.base_offset + pos)
        self.pos = pos + 2

    def remaining_is_padding(self) -> bool:
        """True when only the 1-bit padding of the final byte is left."""
        if self.pos < self.end:
            return False
        mask = (1 << self._nbits) - 1
        return self._nbits < 8 and self._acc & mask == mask

    def read_code(self, spec_table: dict, what: str = "Huffman") -> object:
        start = self.base_offset + self.pos
        code = 0
        for length in range(1, MAX_CODE_LENGTH + 1):
            code = (code << 1) | self.read_bit()
            sym = spec_table.get((length, code))
            if sym is not None:
                return sym
        raise JpegError(f"invalid {what} code", start)


def bit_encode(symbols: Iterable, spec: HuffmanSpec) -> bytes:
    """Pack symbols with their codewords. A ``CoefficientSymbol`` is followed by
    its amplitude in ``size`` bits; anything else is coded as a bare symbol."""
    writer = BitWriter()
    for item in symbols:
        if isinstance(item, CoefficientSymbol):
            key, extra = item.symbol, item.size
        else:
            key, extra = item, 0
        try:
            length, code = spec.codes[key]
        except KeyError:
            raise ValueError(f"symbol {key!r} is not in the code table") from None
        writer.write(code, length)
        if extra:
            writer.write(amplitude_bits(item.amplitude, extra), extra)
    return writer.flush()


def bit_decode(data: bytes, spec: HuffmanSpec, count: int | None = None,
               kind: str | None = None) -> list:
    """Inverse of :func:`bit_encode`.

    With ``kind`` set to "DC" or "AC", amplitude bits are read and
    ``CoefficientSymbol`` objects returned. Without ``count``, decoding stops
    at the first item that would run past the end of the data: trailing
    1-bits are taken as padding unless they spell out whole symbols, so pass
    ``count`` when the table gives some symbol an all-ones code.
    """
    table = spec.decode_table()
    reader = BitReader(data)

    def read_item():
        sym = reader.read_code(table)
        if kind is None:
            return sym
        size = CoefficientSymbol.from_symbol(kind, sym).size
        amplitude = amplitude_value(reader.read_bits(size), size) if size else 0
        return CoefficientSymbol.from_symbol(kind, sym, amplitude)

    out = []
    while count is None or len(out) < count:
        if count is None and reader.remaining_is_padding():
            state = (reader.pos, reader._acc, reader._nbits)
            try:
                out.append(read_item())
            except JpegError:
                reader.pos, reader._acc, reader._nbits = state
                break
            continue
        out.append(read_item())
    return out


# -- flat table arrays for the scan kernels -----------------------------------

def encode_arrays(specs: Sequence[HuffmanSpec]) -> tuple[np.ndarray, np.ndarray]:
    """(codes, lengths) arrays of shape (len(specs), 256); length 0 marks absence."""
    codes = np.zeros((len(specs), 256), dtype=np.int64)
    lengths = np.zeros((len(specs), 256), dtype=np.int32)
    for t, spec in enumerate(specs):
        for sym, (n, code) in spec.codes.items():
            codes[t, sym] = code
            lengths[t, sym] = n
    return codes, lengths


def decode_arrays(specs: Sequence[HuffmanSpec]):
    """Per-length decoding arrays: maxcode (-1 when no codes of that length),
    mincode, valptr and the symbols in canonical order."""
    n = len(specs)
    maxcode = np.full((n, 18), -1, dtype=np.int64)
    mincode = np.zeros((n, 17), dtype=np.int64)
    valptr = np.zeros((n, 17), dtype=np.int32)
    huffval = np.zeros((n, 256), dtype=np.int32)
    for t, spec in enumerate(specs):
        if spec is None:
            continue
        ordered = spec.ordered_symbols()
        huffval[t, :len(ordered)] = ordered
        k = 0
        for length, count in enumerate(spec.counts(), start=1):
            if count:
                valptr[t, length] = k
                mincode[t, length] = spec.codes[ordered[k]][1]
                k += count
                maxcode[t, length] = spec.codes[ordered[k - 1]][1]
    return maxcode, mincode, valptr, huffval
