"""JFIF container: marker segments around a single baseline scan."""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .entropy import ZIGZAG, HuffmanSpec, inverse_zigzag
from .errors import JpegError

log = logging.getLogger(__name__)

SOI, EOI = 0xD8, 0xD9
SOF0, DHT, DQT, DRI, SOS = 0xC0, 0xC4, 0xDB, 0xDD, 0xDA
APP0, COM = 0xE0, 0xFE
RST0 = 0xD0
DAC = 0xCC

JFIF_APP0 = b"JFIF\x00" + bytes([1, 1, 0]) + struct.pack(">HH", 1, 1) + b"\x00\x00"


@dataclass
class FrameComponent:
    id: int
    h: int
    v: int
    quant_id: int


@dataclass
class ScanComponent:
    id: int
    dc_table: int
    ac_table: int


@dataclass
class JpegStream:
    """Parsed (or to-be-written) file contents.

    ``quant_tables`` maps table id to an 8x8 array in natural order;
    ``huffman_tables`` maps (class, id) to a spec, class 0 = DC, 1 = AC.
    ``entropy`` holds the scan bytes exactly as stored (stuffed, with any
    restart markers).
    """

    width: int
    height: int
    components: list[FrameComponent]
    quant_tables: dict[int, np.ndarray]
    huffman_tables: dict[tuple[int, int], HuffmanSpec]
    scan: list[ScanComponent]
    entropy: bytes
    restart_interval: int = 0
    entropy_offset: int = 0
    frame_offset: int = 0
    scan_offset: int = 0
    warnings: list[str] = field(default_factory=list)

    def component(self, cid: int) -> FrameComponent:
        for comp in self.components:
            if comp.id == cid:
                return comp
        raise JpegError(f"scan references unknown component {cid}", self.scan_offset)


def _segment(marker: int, payload: bytes) -> bytes:
    if len(payload) + 2 > 0xFFFF:
        raise JpegError(f"segment 0x{marker:02X} payload too large")
    return bytes([0xFF, marker]) + struct.pack(">H", len(payload) + 2) + payload


def write_stream(stream: JpegStream) -> bytes:
    if not (1 <= stream.width <= 0xFFFF and 1 <= stream.height <= 0xFFFF):
        raise JpegError(f"dimensions {stream.width}x{stream.height} outside [1, 65535]")
    for tid in stream.quant_tables:
        if not 0 <= tid <= 3:
            raise JpegError(f"quantization table id {tid} outside 0..3")
    for tclass, tid in stream.huffman_tables:
        if tclass not in (0, 1) or not 0 <= tid <= 3:
            raise JpegError(f"Huffman table ({tclass}, {tid}) outside the 4 ids per class")

    out = bytearray([0xFF, SOI])
    out += _segment(APP0, JFIF_APP0)
    for tid in sorted(stream.quant_tables):
        table = np.asarray(stream.quant_tables[tid]).reshape(64)[ZIGZAG]
        if table.min() < 1 or table.max() > 255:
            raise JpegError(f"quantization table {tid} not representable in 8 bits")
        out += _segment(DQT, bytes([tid]) + bytes(table.astype(np.uint8).tolist()))
    sof = struct.pack(">BHHB", 8, stream.height, stream.width, len(stream.components))
    for comp in stream.components:
        sof += bytes([comp.id, (comp.h << 4) | comp.v, comp.quant_id])
    out += _segment(SOF0, sof)
    for tclass, tid in sorted(stream.huffman_tables):
        spec = stream.huffman_tables[(tclass, tid)]
        symbols = spec.ordered_symbols()
        out += _segment(DHT, bytes([(tclass << 4) | tid]) + bytes(spec.counts()) + bytes(symbols))
    if stream.restart_interval:
        out += _segment(DRI, struct.pack(">H", stream.restart_interval))
    sos = bytes([len(stream.scan)])
    for sc in stream.scan:
        sos += bytes([sc.id, (sc.dc_table << 4) | sc.ac_table])
    sos += bytes([0, 63, 0])
    out += _segment(SOS, sos)
    out += stream.entropy
    out += bytes([0xFF, EOI])
    return bytes(out)


class _Cursor:
    def __init__(self, data: bytes, pos: int, end: int):
        self.data = data
        self.pos = pos
        self.end = end

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > self.end:
            raise JpegError(f"truncated {what}", self.pos)
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def byte(self, what: str) -> int:
        return self.take(1, what)[0]

    def u16(self, what: str) -> int:
        return struct.unpack(">H", self.take(2, what))[0]


def _scan_end(data: bytes, pos: int) -> int:
    """Index of the first marker after entropy data starting at ``pos``."""
    n = len(data)
    while True:
        pos = data.find(b"\xff", pos)
        if pos < 0 or pos + 1 >= n:
            return n
        nxt = data[pos + 1]
        if nxt == 0 or RST0 <= nxt <= RST0 + 7:
            pos += 2
        else:
            return pos


def parse_stream(data: bytes) -> JpegStream:
    data = bytes(data)
    if data[:2] != b"\xff\xd8":
        raise JpegError("not a JPEG stream (missing SOI marker)", 0)
    quant: dict[int, np.ndarray] = {}
    huff: dict[tuple[int, int], HuffmanSpec] = {}
    warnings: list[str] = []
    frame = None
    scan = None
    entropy = b""
    entropy_offset = 0
    restart_interval = 0
    frame_offset = scan_offset = 0
    pos = 2
    n = len(data)
    while True:
        if pos >= n:
            raise JpegError("truncated stream: missing EOI marker", n)
        if data[pos] != 0xFF:
            raise JpegError(f"expected a marker, found byte 0x{data[pos]:02X}", pos)
        while pos + 1 < n and data[pos + 1] == 0xFF:  # fill bytes
            pos += 1
        if pos + 1 >= n:
            raise JpegError("truncated marker", pos)
        marker = data[pos + 1]
        marker_pos = pos
        pos += 2
        if marker == EOI:
            break
        if marker == SOI or marker == 0x01 or RST0 <= marker <= RST0 + 7 or marker == 0x00:
            raise JpegError(f"unexpected marker 0xFF{marker:02X}", marker_pos)
        if pos + 2 > n:
            raise JpegError(f"truncated length of segment 0xFF{marker:02X}", pos)
        length = struct.unpack(">H", data[pos:pos + 2])[0]
        if length < 2:
            raise JpegError(f"invalid segment length {length}", pos)
        end = pos + length
        if end > n:
            raise JpegError(f"truncated segment 0xFF{marker:02X}", n)
        cur = _Cursor(data, pos + 2, end)

        if marker == DQT:
            while cur.pos < end:
                pq_tq = cur.byte("DQT")
                precision, tid = pq_tq >> 4, pq_tq & 0x0F
                if precision != 0:
                    raise JpegError("16-bit quantization tables are not baseline", cur.pos - 1)
                if tid > 3:
                    raise JpegError(f"quantization table id {tid} outside 0..3", cur.pos - 1)
                values = np.frombuffer(cur.take(64, "DQT table"), dtype=np.uint8).astype(np.int32)
                if values.min() == 0:
                    raise JpegError("zero quantization divisor", cur.pos - 64)
                if tid in quant:
                    warnings.append(f"quantization table {tid} redefined at byte {marker_pos}")
                quant[tid] = inverse_zigzag(values)
        elif marker == DHT:
            while cur.pos < end:
                tc_th = cur.byte("DHT")
                tclass, tid = tc_th >> 4, tc_th & 0x0F
                if tclass > 1 or tid > 3:
                    raise JpegError(f"invalid Huffman table class/id 0x{tc_th:02X}", cur.pos - 1)
                counts = list(cur.take(16, "DHT counts"))
                total = sum(counts)
                if total > 256:
                    raise JpegError("Huffman table lists more than 256 symbols", cur.pos - 16)
                symbols = list(cur.take(total, "DHT symbols"))
                try:
                    spec = HuffmanSpec.from_counts(counts, symbols)
                except JpegError as exc:
                    raise JpegError(exc.message, cur.pos - total - 17) from None
                if (tclass, tid) in huff:
                    warnings.append(f"Huffman table ({tclass}, {tid}) redefined at byte {marker_pos}")
                huff[(tclass, tid)] = spec
        elif marker == SOF0:
            if frame is not None:
                raise JpegError("more than one frame header", marker_pos)
            precision = cur.byte("SOF0")
            height = cur.u16("SOF0")
            width = cur.u16("SOF0")
            ncomp = cur.byte("SOF0")
            if precision != 8:
                raise JpegError(f"sample precision {precision} is not baseline", pos + 2)
            if height == 0 or width == 0:
                raise JpegError(f"unsupported frame size {width}x{height}", pos + 3)
            if ncomp not in (1, 3):
                raise JpegError(f"unsupported component count {ncomp}", pos + 7)
            comps = []
            for _ in range(ncomp):
                cid, hv, tq = cur.take(3, "SOF0 component")
                h, v = hv >> 4, hv & 0x0F
                if not (1 <= h <= 4 and 1 <= v <= 4):
                    raise JpegError(f"invalid sampling factors {h}x{v}", cur.pos - 2)
                if tq > 3:
                    raise JpegError(f"quantization table id {tq} outside 0..3", cur.pos - 1)
                if any(c.id == cid for c in comps):
                    raise JpegError(f"duplicate component id {cid}", cur.pos - 3)
                comps.append(FrameComponent(cid, h, v, tq))
            frame = (width, height, comps)
            frame_offset = marker_pos
        elif 0xC1 <= marker <= 0xCF and marker not in (DHT, 0xC8, DAC):
            raise JpegError(f"unsupported coding process (SOF{marker - 0xC0}); only baseline",
                            marker_pos)
        elif marker == DAC:
            raise JpegError("arithmetic coding is not supported", marker_pos)
        elif marker == DRI:
            restart_interval = cur.u16("DRI")
        elif marker == SOS:
            if frame is None:
                raise JpegError("scan before frame header", marker_pos)
            if scan is not None:
                raise JpegError("multiple scans are not supported", marker_pos)
            ns = cur.byte("SOS")
            if ns != len(frame[2]):
                raise JpegError(f"scan has {ns} components, frame has {len(frame[2])}", pos + 2)
            scan = []
            for _ in range(ns):
                cid, tables = cur.take(2, "SOS component")
                if not any(c.id == cid for c in frame[2]) or any(s.id == cid for s in scan):
                    raise JpegError(f"bad scan component selector {cid}", cur.pos - 2)
                scan.append(ScanComponent(cid, tables >> 4, tables & 0x0F))
            ss, se, ahal = cur.take(3, "SOS spectral selection")
            if (ss, se, ahal) != (0, 63, 0):
                raise JpegError("progressive scan parameters are not baseline", cur.pos - 3)
            entropy_offset = end
            scan_offset = marker_pos
            stop = _scan_end(data, end)
            entropy = data[end:stop]
            pos = stop
            continue
        # APPn, COM and anything else with a length: skipped
        if cur.pos != end and marker in (DQT, DHT, SOF0, DRI):
            raise JpegError(f"segment 0xFF{marker:02X} length mismatch", cur.pos)
        pos = end

    if frame is None:
        raise JpegError("no frame header before EOI", pos - 2)
    if scan is None:
        raise JpegError("no scan before EOI", pos - 2)
    for w in warnings:
        log.warning(w)
    width, height, comps = frame
    return JpegStream(width, height, comps, quant, huff, scan, entropy,
                      restart_interval, entropy_offset, frame_offset, scan_offset, warnings)
