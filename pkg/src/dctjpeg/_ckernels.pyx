# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels. Same contract as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

from .errors import JpegError

cnp.import_array()

BACKEND = "cython"


cdef inline int category(int v) nogil:
    cdef int n = 0
    if v < 0:
        v = -v
    while v:
        n += 1
        v >>= 1
    return n


def count_symbols(int32_t[:, ::1] zz, int32_t[::1] comp, int32_t[::1] dc_tab,
                  int32_t[::1] ac_tab, int ntables):
    cdef Py_ssize_t n = zz.shape[0], i, k
    cdef int c, diff, size, run, v
    dc_np = np.zeros((ntables, 256), dtype=np.int64)
    ac_np = np.zeros((ntables, 256), dtype=np.int64)
    cdef int64_t[:, ::1] dc_freq = dc_np
    cdef int64_t[:, ::1] ac_freq = ac_np
    cdef int32_t pred[256]
    for c in range(256):
        pred[c] = 0
    for i in range(n):
        c = comp[i]
        diff = zz[i, 0] - pred[c]
        pred[c] = zz[i, 0]
        size = category(diff)
        if size > 11:
            raise ValueError(f"DC difference {diff} out of range")
        dc_freq[dc_tab[i], size] += 1
        run = 0
        for k in range(1, 64):
            v = zz[i, k]
            if v == 0:
                run += 1
                continue
            size = category(v)
            if size > 11:
                raise ValueError(f"AC amplitude {v} out of range")
            while run > 15:
                ac_freq[ac_tab[i], 0xF0] += 1
                run -= 16
            ac_freq[ac_tab[i], (run << 4) | size] += 1
            run = 0
        if run:
            ac_freq[ac_tab[i], 0] += 1
    return dc_np, ac_np


cdef struct Writer:
    uint8_t* out
    Py_ssize_t pos
    uint64_t acc
    int nbits


cdef inline void put_bits(Writer* w, uint64_t value, int nbits) nogil:
    cdef uint8_t byte
    w.acc = (w.acc << nbits) | (value & ((<uint64_t>1 << nbits) - 1))
    w.nbits += nbits
    while w.nbits >= 8:
        w.nbits -= 8
        byte = <uint8_t>((w.acc >> w.nbits) & 0xFF)
        w.out[w.pos] = byte
        w.pos += 1
        if byte == 0xFF:
            w.out[w.pos] = 0
            w.pos += 1
    w.acc &= (<uint64_t>1 << w.nbits) - 1


def encode_scan(int32_t[:, ::1] zz, int32_t[::1] comp, int32_t[::1] dc_tab,
                int32_t[::1] ac_tab, int64_t[:, ::1] dc_code, int32_t[:, ::1] dc_len,
                int64_t[:, ::1] ac_code, int32_t[:, ::1] ac_len):
    cdef Py_ssize_t n = zz.shape[0], i, k
    cdef int c, diff, size, run, v, sym, t
    cdef int32_t pred[256]
    # worst case per block: 64 * (16 + 11) bits, doubled for stuffing
    buf_np = np.empty(n * 432 + 16, dtype=np.uint8)
    cdef uint8_t[::1] buf = buf_np
    cdef Writer w
    w.out = &buf[0]
    w.pos = 0
    w.acc = 0
    w.nbits = 0
    for c in range(256):
        pred[c] = 0
    for i in range(n):
        c = comp[i]
        diff = zz[i, 0] - pred[c]
        pred[c] = zz[i, 0]
        size = category(diff)
        if size > 11:
            raise ValueError(f"DC difference {diff} out of range")
        t = dc_tab[i]
        if dc_len[t, size] == 0:
            raise ValueError(f"symbol 0x{size:02X} missing from Huffman table")
        put_bits(&w, dc_code[t, size], dc_len[t, size])
        if size:
            put_bits(&w, diff if diff >= 0 else diff + (1 << size) - 1, size)
        t = ac_tab[i]
        run = 0
        for k in range(1, 64):
            v = zz[i, k]
            if v == 0:
                run += 1
                continue
            size = category(v)
            if size > 11:
                raise ValueError(f"AC amplitude {v} out of range")
            while run > 15:
                if ac_len[t, 0xF0] == 0:
                    raise ValueError("symbol 0xF0 missing from Huffman table")
                put_bits(&w, ac_code[t, 0xF0], ac_len[t, 0xF0])
                run -= 16
            sym = (run << 4) | size
            if ac_len[t, sym] == 0:
                raise ValueError(f"symbol 0x{sym:02X} missing from Huffman table")
            put_bits(&w, ac_code[t, sym], ac_len[t, sym])
            put_bits(&w, v if v >= 0 else v + (1 << size) - 1, size)
            run = 0
        if run:
            if ac_len[t, 0] == 0:
                raise ValueError("symbol 0x00 missing from Huffman table")
            put_bits(&w, ac_code[t, 0], ac_len[t, 0])
    if w.nbits:
        put_bits(&w, (1 << (8 - w.nbits)) - 1, 8 - w.nbits)
    return bytes(buf[:w.pos])


cdef struct Reader:
    const uint8_t* data
    Py_ssize_t pos
    Py_ssize_t end
    uint64_t acc
    int nbits
    int error          # 0 ok, 1 end of data, 2 marker, 3 bad code
    Py_ssize_t error_pos


cdef inline int fill(Reader* r) nogil:
    cdef uint8_t byte
    if r.pos >= r.end:
        r.error = 1
        r.error_pos = r.pos
        return -1
    byte = r.data[r.pos]
    if byte == 0xFF:
        if r.pos + 1 >= r.end:
            r.error = 1
            r.error_pos = r.pos + 1
            return -1
        if r.data[r.pos + 1] != 0:
            r.error = 2
            r.error_pos = r.pos
            return -1
        r.pos += 1
    r.pos += 1
    r.acc = (r.acc << 8) | byte
    r.nbits += 8
    return 0


cdef inline int get_bits(Reader* r, int n) nogil:
    # returns -1 on error (n <= 16 so valid results are non-negative)
    cdef int value
    while r.nbits < n:
        if fill(r) < 0:
            return -1
    r.nbits -= n
    value = <int>((r.acc >> r.nbits) & ((<uint64_t>1 << n) - 1))
    r.acc &= (<uint64_t>1 << r.nbits) - 1
    return value


cdef inline int decode_symbol(Reader* r, const int64_t* maxcode, const int64_t* mincode,
                              const int32_t* valptr, const int32_t* huffval) nogil:
    cdef Py_ssize_t start = r.pos
    cdef int bit = get_bits(r, 1)
    cdef int64_t code
    cdef int length = 1
    if bit < 0:
        return -1
    code = bit
    while code > maxcode[length]:
        length += 1
        if length > 16:
            r.error = 3
            r.error_pos = start
            return -1
        bit = get_bits(r, 1)
        if bit < 0:
            return -1
        code = (code << 1) | bit
    return huffval[valptr[length] + code - mincode[length]]


cdef inline int extend(int bits, int size) nogil:
    if bits >> (size - 1):
        return bits
    return bits - (1 << size) + 1


def decode_scan(const uint8_t[::1] data, Py_ssize_t start, Py_ssize_t end,
                Py_ssize_t base_offset, int32_t[::1] comp, int32_t[::1] dc_tab,
                int32_t[::1] ac_tab, int ncomp, dc_tables, ac_tables,
                Py_ssize_t restart_blocks):
    cdef Py_ssize_t n = comp.shape[0], i
    out_np = np.zeros((n, 64), dtype=np.int32)
    cdef int32_t[:, ::1] out = out_np
    cdef int64_t[:, ::1] dmax = dc_tables[0]
    cdef int64_t[:, ::1] dmin = dc_tables[1]
    cdef int32_t[:, ::1] dptr = dc_tables[2]
    cdef int32_t[:, ::1] dval = dc_tables[3]
    cdef int64_t[:, ::1] amax = ac_tables[0]
    cdef int64_t[:, ::1] amin = ac_tables[1]
    cdef int32_t[:, ::1] aptr = ac_tables[2]
    cdef int32_t[:, ::1] aval = ac_tables[3]
    cdef int64_t pred[256]
    cdef int c, t, k, sym, run, size, bits, restarts = 0
    cdef Reader r
    cdef const char* msg = NULL
    if end > data.shape[0]:
        end = data.shape[0]
    r.data = &data[0] if data.shape[0] else NULL
    r.pos = start
    r.end = end
    r.acc = 0
    r.nbits = 0
    r.error = 0
    r.error_pos = 0
    for c in range(256):
        pred[c] = 0
    with nogil:
        for i in range(n):
            if restart_blocks and i and i % restart_blocks == 0:
                r.acc = 0
                r.nbits = 0
                if (r.pos + 1 >= r.end or r.data[r.pos] != 0xFF
                        or r.data[r.pos + 1] != 0xD0 + (restarts & 7)):
                    r.error = 4
                    r.error_pos = r.pos
                    break
                r.pos += 2
                restarts += 1
                for c in range(ncomp):
                    pred[c] = 0
            t = dc_tab[i]
            size = decode_symbol(&r, &dmax[t, 0], &dmin[t, 0], &dptr[t, 0], &dval[t, 0])
            if size < 0:
                break
            if size > 11:
                r.error = 5
                r.error_pos = r.pos
                break
            c = comp[i]
            if size:
                bits = get_bits(&r, size)
                if bits < 0:
                    break
                pred[c] += extend(bits, size)
                if pred[c] < -32768 or pred[c] > 32767:
                    r.error = 6
                    r.error_pos = r.pos
                    break
            out[i, 0] = <int32_t>pred[c]
            t = ac_tab[i]
            k = 1
            while k < 64:
                sym = decode_symbol(&r, &amax[t, 0], &amin[t, 0], &aptr[t, 0], &aval[t, 0])
                if sym < 0:
                    break
                run = sym >> 4
                size = sym & 0x0F
                if size == 0:
                    if run == 15:
                        k += 16
                        if k > 64:
                            r.error = 7
                            r.error_pos = r.pos
                            break
                        continue
                    break
                k += run
                if k > 63:
                    r.error = 8
                    r.error_pos = r.pos
                    break
                bits = get_bits(&r, size)
                if bits < 0:
                    break
                out[i, k] = extend(bits, size)
                k += 1
            if r.error:
                break
    if r.error:
        pos = base_offset + r.error_pos
        if r.error == 1:
            raise JpegError("unexpected end of entropy-coded data", pos)
        if r.error == 2:
            raise JpegError(f"unexpected marker 0xFF{data[r.error_pos + 1]:02X} in entropy-coded data", pos)
        if r.error == 3:
            raise JpegError("invalid Huffman code", pos)
        if r.error == 4:
            raise JpegError(f"expected marker 0xFF{0xD0 + (restarts & 7):02X}", pos)
        if r.error == 5:
            raise JpegError(f"invalid DC magnitude category {size}", pos)
        if r.error == 6:
            raise JpegError("DC coefficient out of range", pos)
        if r.error == 7:
            raise JpegError("zero run overflows the block", pos)
        raise JpegError("AC coefficients overflow the block", pos)
    return out_np
