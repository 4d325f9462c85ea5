"""Pure-Python scan kernels. Same contract as the compiled ``_ckernels``."""
import numpy as np

from .entropy import BitReader, BitWriter
from .errors import JpegError

BACKEND = "python"


def _category(v):
    return (v if v >= 0 else -v).bit_length()


def count_symbols(zz, comp, dc_tab, ac_tab, ntables):
    dc_freq = np.zeros((ntables, 256), dtype=np.int64)
    ac_freq = np.zeros((ntables, 256), dtype=np.int64)
    pred = {}
    for i, block in enumerate(np.asarray(zz).tolist()):
        c = int(comp[i])
        diff = block[0] - pred.get(c, 0)
        pred[c] = block[0]
        size = _category(diff)
        if size > 11:
            raise ValueError(f"DC difference {diff} out of range")
        dc_freq[dc_tab[i], size] += 1
        t = ac_tab[i]
        run = 0
        for v in block[1:]:
            if v == 0:
                run += 1
                continue
            size = _category(v)
            if size > 11:
                raise ValueError(f"AC amplitude {v} out of range")
            while run > 15:
                ac_freq[t, 0xF0] += 1
                run -= 16
            ac_freq[t, (run << 4) | size] += 1
            run = 0
        if run:
            ac_freq[t, 0x00] += 1
    return dc_freq, ac_freq


def encode_scan(zz, comp, dc_tab, ac_tab, dc_code, dc_len, ac_code, ac_len):
    writer = BitWriter()
    write = writer.write
    dc_code, dc_len = dc_code.tolist(), dc_len.tolist()
    ac_code, ac_len = ac_code.tolist(), ac_len.tolist()
    pred = {}

    def put(codes, lengths, sym):
        n = lengths[sym]
        if not n:
            raise ValueError(f"symbol 0x{sym:02X} missing from Huffman table")
        write(codes[sym], n)

    for i, block in enumerate(np.asarray(zz).tolist()):
        c = int(comp[i])
        diff = block[0] - pred.get(c, 0)
        pred[c] = block[0]
        size = _category(diff)
        if size > 11:
            raise ValueError(f"DC difference {diff} out of range")
        t = dc_tab[i]
        put(dc_code[t], dc_len[t], size)
        if size:
            write(diff if diff >= 0 else diff + (1 << size) - 1, size)
        t = ac_tab[i]
        codes, lengths = ac_code[t], ac_len[t]
        run = 0
        for v in block[1:]:
            if v == 0:
                run += 1
                continue
            size = _category(v)
            if size > 11:
                raise ValueError(f"AC amplitude {v} out of range")
            while run > 15:
                put(codes, lengths, 0xF0)
                run -= 16
            put(codes, lengths, (run << 4) | size)
            write(v if v >= 0 else v + (1 << size) - 1, size)
            run = 0
        if run:
            put(codes, lengths, 0x00)
    return writer.flush()


def _decode_symbol(reader, maxcode, mincode, valptr, huffval):
    start = reader.base_offset + reader.pos
    code = reader.read_bit()
    length = 1
    while code > maxcode[length]:
        length += 1
        if length > 16:
            raise JpegError("invalid Huffman code", start)
        code = (code << 1) | reader.read_bit()
    return huffval[valptr[length] + code - mincode[length]]


def _receive(reader, size):
    bits = reader.read_bits(size)
    return bits if bits >> (size - 1) else bits - (1 << size) + 1


def decode_scan(data, start, end, base_offset, comp, dc_tab, ac_tab, ncomp,
                dc_tables, ac_tables, restart_blocks):
    n = len(comp)
    out = np.zeros((n, 64), dtype=np.int32)
    reader = BitReader(data, start, end, base_offset)
    dmax, dmin, dptr, dval = (a.tolist() for a in dc_tables)
    amax, amin, aptr, aval = (a.tolist() for a in ac_tables)
    pred = [0] * ncomp
    restarts = 0
    for i in range(n):
        if restart_blocks and i and i % restart_blocks == 0:
            reader.align()
            reader.expect_marker(0xD0 + (restarts & 7))
            restarts += 1
            pred = [0] * ncomp
        block = [0] * 64
        t = dc_tab[i]
        size = _decode_symbol(reader, dmax[t], dmin[t], dptr[t], dval[t])
        if size > 11:
            raise JpegError(f"invalid DC magnitude category {size}", reader.base_offset + reader.pos)
        c = comp[i]
        pred[c] += _receive(reader, size) if size else 0
        if not -32768 <= pred[c] <= 32767:
            raise JpegError("DC coefficient out of range", reader.base_offset + reader.pos)
        block[0] = pred[c]
        t = ac_tab[i]
        mx, mn, ptr, val = amax[t], amin[t], aptr[t], aval[t]
        k = 1
        while k < 64:
            sym = _decode_symbol(reader, mx, mn, ptr, val)
            run, size = sym >> 4, sym & 0x0F
            if size == 0:
                if run == 15:
                    k += 16
                    if k > 64:
                        raise JpegError("zero run overflows the block",
                                        reader.base_offset + reader.pos)
                    continue
                break
            k += run
            if k > 63:
                raise JpegError("AC coefficients overflow the block",
                                reader.base_offset + reader.pos)
            block[k] = _receive(reader, size)
            k += 1
        out[i] = block
    return out
