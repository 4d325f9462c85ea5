"""Encoder and decoder pipelines built from the stage modules."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rounding import round_half_away
from .color import level_shift, rgb_planes_to_ycbcr, ycbcr_planes_to_rgb
from .container import FrameComponent, JpegStream, ScanComponent, parse_stream, write_stream
from .entropy import (UNZIGZAG, ZIGZAG, build_huffman_lengths, canonicalize, decode_arrays,
                      encode_arrays)
from .errors import JpegError
from .image import RasterImage
from .quantize import QuantTable, default_table, scaled_table
from .transform import dct2_fast, idct2_fast

# placeholder symbol that keeps the all-ones codeword of each table unused
_RESERVED = 256
_SUBSAMPLING = {"444": ((1, 1), (1, 1)), "420": ((2, 2), (1, 1))}


@dataclass(frozen=True)
class EncodeParams:
    quality: int = 50
    subsampling: str = "444"

    def __post_init__(self):
        if not isinstance(self.quality, (int, np.integer)) or not 1 <= self.quality <= 100:
            raise ValueError(f"quality must be an integer in [1, 100], got {self.quality!r}")
        sub = str(self.subsampling).replace(":", "")
        if sub not in _SUBSAMPLING:
            raise ValueError(f"subsampling must be 444 or 420, got {self.subsampling!r}")
        object.__setattr__(self, "subsampling", sub)


@dataclass
class BlockGrid:
    """Blocks of a padded plane, shape (blocks_per_col, blocks_per_row, 8, 8)."""

    blocks: np.ndarray
    height: int
    width: int

    @property
    def blocks_per_row(self) -> int:
        return self.blocks.shape[1]

    @property
    def blocks_per_col(self) -> int:
        return self.blocks.shape[0]

    @property
    def sequence(self) -> np.ndarray:
        """Blocks in row-major order, shape (n, 8, 8)."""
        return self.blocks.reshape(-1, 8, 8)


def _pad_edge(plane: np.ndarray, height: int, width: int) -> np.ndarray:
    h, w = plane.shape
    return np.pad(plane, ((0, height - h), (0, width - w)), mode="edge")


def split_into_blocks(plane, pad_to: tuple[int, int] | None = None) -> BlockGrid:
    """Tile a plane into 8x8 blocks, replicating the last row/column as padding.

    ``pad_to`` may request a larger padded size (a multiple of 8), as needed
    when several blocks form one coding unit.
    """
    plane = np.asarray(plane)
    if plane.ndim != 2 or plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D plane, got shape {plane.shape}")
    h, w = plane.shape
    ph, pw = pad_to or (-(-h // 8) * 8, -(-w // 8) * 8)
    if ph % 8 or pw % 8 or ph < h or pw < w:
        raise ValueError(f"cannot pad {h}x{w} to {ph}x{pw}")
    padded = _pad_edge(plane, ph, pw)
    blocks = padded.reshape(ph // 8, 8, pw // 8, 8).swapaxes(1, 2)
    return BlockGrid(np.ascontiguousarray(blocks), h, w)


def merge_blocks(grid: BlockGrid) -> np.ndarray:
    rows, cols = grid.blocks.shape[:2]
    plane = grid.blocks.swapaxes(1, 2).reshape(rows * 8, cols * 8)
    return np.ascontiguousarray(plane[:grid.height, :grid.width])


def chroma_resample(plane, factor: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    """2x2 box-average downsampling or pixel-replication upsampling.

    ``down`` replicates the last row/column of odd-sized planes first. ``up``
    crops to ``shape`` when given.
    """
    plane = np.asarray(plane)
    if factor == "down":
        h, w = plane.shape
        padded = _pad_edge(plane, h + h % 2, w + w % 2).astype(np.float64)
        mean = padded.reshape((h + 1) // 2, 2, (w + 1) // 2, 2).mean(axis=(1, 3))
        return np.clip(round_half_away(mean), 0, 255).astype(plane.dtype)
    if factor == "up":
        out = plane.repeat(2, axis=0).repeat(2, axis=1)
        if shape is not None:
            out = out[:shape[0], :shape[1]]
        return np.ascontiguousarray(out)
    raise ValueError(f"factor must be 'down' or 'up', not {factor!r}")


def _forward_blocks(blocks: np.ndarray, table: QuantTable, workers: int) -> np.ndarray:
    """Level-shifted spatial blocks (n, 8, 8) -> zigzag-ordered quantized (n, 64)."""

    def run(chunk):
        coeffs = dct2_fast(chunk)
        q = round_half_away(coeffs / table.divisors)
        return q.reshape(-1, 64)[:, ZIGZAG].astype(np.int32)

    if workers <= 1 or len(blocks) < 2 * workers:
        return run(blocks)
    chunks = np.array_split(blocks, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(run, chunks)))


def _scan_order(grids: list[tuple[int, int]], sampling: list[tuple[int, int]],
                mcu_rows: int, mcu_cols: int):
    """Flat block indices, in scan order, into the concatenated component grids.

    ``grids`` holds (blocks_per_col, blocks_per_row) per component. A single
    component is scanned in plain raster order; several are interleaved per MCU.
    """
    offsets = np.cumsum([0] + [r * c for r, c in grids])
    if len(grids) == 1:
        n = grids[0][0] * grids[0][1]
        return np.arange(n), np.zeros(n, dtype=np.int32)
    my, mx = np.meshgrid(np.arange(mcu_rows), np.arange(mcu_cols), indexing="ij")
    index, comp = [], []
    for c, (h, v) in enumerate(sampling):
        for dv in range(v):
            for dh in range(h):
                row = my * v + dv
                col = mx * h + dh
                index.append(offsets[c] + row * grids[c][1] + col)
                comp.append(np.full(my.shape, c))
    index = np.stack(index, axis=-1).reshape(-1)
    comp = np.stack(comp, axis=-1).reshape(-1).astype(np.int32)
    return index, comp


def _huffman_spec(freq: np.ndarray):
    freqs = {sym: int(n) for sym, n in enumerate(freq) if n}
    freqs[_RESERVED] = 1
    return canonicalize(build_huffman_lengths(freqs), reserved=_RESERVED)


def encode_image(image: RasterImage, params: EncodeParams | None = None,
                 workers: int = 1) -> bytes:
    """Compress ``image`` to a baseline JFIF byte string.

    ``workers`` > 1 spreads the transform and quantization over threads; the
    output is byte-identical for any value.
    """
    params = params or EncodeParams()
    if image.width > 0xFFFF or image.height > 0xFFFF:
        raise JpegError(f"image {image.width}x{image.height} exceeds 65535 pixels per side")
    height, width = image.height, image.width

    if image.channels == 1:
        planes = [image.planes[0]]
        sampling = [(1, 1)]
        roles = ["luminance"]
    else:
        ycc = rgb_planes_to_ycbcr(image.planes)
        luma_s, chroma_s = _SUBSAMPLING[params.subsampling]
        planes = [ycc[0], ycc[1], ycc[2]]
        if chroma_s != luma_s:
            planes[1:] = [chroma_resample(p, "down") for p in planes[1:]]
        sampling = [luma_s, chroma_s, chroma_s]
        roles = ["luminance", "chrominance", "chrominance"]

    tables = {role: scaled_table(default_table(role), params.quality) for role in set(roles)}
    hmax = max(h for h, _ in sampling)
    vmax = max(v for _, v in sampling)
    mcu_cols = -(-width // (8 * hmax))
    mcu_rows = -(-height // (8 * vmax))

    zz_parts, grids = [], []
    for plane, (h, v), role in zip(planes, sampling, roles):
        if len(planes) == 1:
            pad = None
        else:
            pad = (mcu_rows * v * 8, mcu_cols * h * 8)
        grid = split_into_blocks(level_shift(plane, "forward"), pad)
        grids.append(grid.blocks.shape[:2])
        zz_parts.append(_forward_blocks(grid.sequence, tables[role], workers))
    index, comp = _scan_order(grids, sampling, mcu_rows, mcu_cols)
    zz = np.ascontiguousarray(np.concatenate(zz_parts)[index])
    tab = np.array([0 if roles[c] == "luminance" else 1 for c in range(len(planes))],
                   dtype=np.int32)[comp]

    ntab = len(tables)
    dc_freq, ac_freq = _kernels.count_symbols(zz, comp, tab, tab, ntab)
    dc_specs = [_huffman_spec(dc_freq[t]) for t in range(ntab)]
    ac_specs = [_huffman_spec(ac_freq[t]) for t in range(ntab)]
    entropy = _kernels.encode_scan(zz, comp, tab, tab, *encode_arrays(dc_specs),
                                   *encode_arrays(ac_specs))

    table_ids = {"luminance": 0, "chrominance": 1}
    components = [FrameComponent(i + 1, h, v, table_ids[role])
                  for i, ((h, v), role) in enumerate(zip(sampling, roles))]
    scan = [ScanComponent(i + 1, table_ids[role], table_ids[role]) for i, role in enumerate(roles)]
    huffman = {}
    for t in range(ntab):
        huffman[(0, t)] = dc_specs[t]
        huffman[(1, t)] = ac_specs[t]
    stream = JpegStream(
        width=width,
        height=height,
        components=components,
        quant_tables={table_ids[r]: tables[r].divisors for r in tables},
        huffman_tables=huffman,
        scan=scan,
        entropy=entropy,
    )
    return write_stream(stream)


def decode_coefficients(stream: JpegStream):
    """Entropy-decode the scan. Returns per-component quantized blocks of shape
    (blocks_per_col, blocks_per_row, 8, 8), in frame component order."""
    comps = [stream.component(sc.id) for sc in stream.scan]
    hmax = max(c.h for c in stream.components)
    vmax = max(c.v for c in stream.components)
    for c in stream.components:
        if hmax % c.h or vmax % c.v:
            raise JpegError(f"unsupported sampling factors {c.h}x{c.v} for component {c.id}",
                            stream.frame_offset)
        if c.quant_id not in stream.quant_tables:
            raise JpegError(f"component {c.id} uses undefined quantization table {c.quant_id}",
                            stream.frame_offset)
    for sc in stream.scan:
        for key in ((0, sc.dc_table), (1, sc.ac_table)):
            if key not in stream.huffman_tables:
                raise JpegError(f"scan uses undefined Huffman table {key}", stream.scan_offset)

    if len(comps) == 1:
        c = comps[0]
        cw = -(-stream.width * c.h // hmax)
        ch = -(-stream.height * c.v // vmax)
        grids = [(-(-ch // 8), -(-cw // 8))]
        blocks_per_mcu = 1
        sampling = [(1, 1)]
        mcu_rows = mcu_cols = 0
    else:
        mcu_cols = -(-stream.width // (8 * hmax))
        mcu_rows = -(-stream.height // (8 * vmax))
        grids = [(mcu_rows * c.v, mcu_cols * c.h) for c in comps]
        blocks_per_mcu = sum(c.h * c.v for c in comps)
        sampling = [(c.h, c.v) for c in comps]
    total = sum(r * c for r, c in grids)
    # every block costs at least two bits (DC and AC codes)
    if total > 4 * len(stream.entropy) + 4:
        raise JpegError(f"scan data too short for {total} blocks", stream.entropy_offset)

    index, comp = _scan_order(grids, sampling, mcu_rows, mcu_cols)
    dc_ids = np.array([sc.dc_table for sc in stream.scan], dtype=np.int32)[comp]
    ac_ids = np.array([sc.ac_table for sc in stream.scan], dtype=np.int32)[comp]
    dc_tables = decode_arrays([stream.huffman_tables.get((0, t)) for t in range(4)])
    ac_tables = decode_arrays([stream.huffman_tables.get((1, t)) for t in range(4)])
    zz = _kernels.decode_scan(stream.entropy, 0, len(stream.entropy), stream.entropy_offset,
                              comp, dc_ids, ac_ids, len(comps), dc_tables, ac_tables,
                              stream.restart_interval * blocks_per_mcu)
    flat = np.empty_like(zz)
    flat[index] = zz
    natural = flat[:, UNZIGZAG].reshape(-1, 8, 8)
    out = {}
    start = 0
    for c, (rows, cols) in zip(comps, grids):
        out[c.id] = natural[start:start + rows * cols].reshape(rows, cols, 8, 8)
        start += rows * cols
    return [out[c.id] for c in stream.components]


def decode_planes(data: bytes) -> tuple[JpegStream, list[np.ndarray]]:
    """Decode each component at its own resolution (before upsampling and
    colour conversion)."""
    stream = parse_stream(data)
    coeffs = decode_coefficients(stream)
    hmax = max(c.h for c in stream.components)
    vmax = max(c.v for c in stream.components)
    planes = []
    for comp, blocks in zip(stream.components, coeffs):
        table = stream.quant_tables[comp.quant_id]
        spatial = idct2_fast(blocks.astype(np.float64) * table)
        samples = level_shift(np.clip(round_half_away(spatial), -1024, 1024), "inverse")
        cw = -(-stream.width * comp.h // hmax)
        ch = -(-stream.height * comp.v // vmax)
        planes.append(merge_blocks(BlockGrid(samples, ch, cw)))
    return stream, planes


def decode_image(data: bytes) -> RasterImage:
    stream, planes = decode_planes(data)
    hmax = max(c.h for c in stream.components)
    vmax = max(c.v for c in stream.components)
    full = []
    for comp, plane in zip(stream.components, planes):
        fy, fx = vmax // comp.v, hmax // comp.h
        if fy > 1 or fx > 1:
            plane = plane.repeat(fy, axis=0).repeat(fx, axis=1)
        full.append(plane[:stream.height, :stream.width])
    stacked = np.stack(full)
    if len(full) == 3:
        stacked = ycbcr_planes_to_rgb(stacked)
    return RasterImage(stacked)


def raw_size(image: RasterImage) -> int:
    """Uncompressed pixel payload in bytes."""
    return image.channels * image.width * image.height

