"""Command-line interface: encode, decode, metrics and per-stage inspection."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import image as pnm
from .codec import EncodeParams, decode_image, encode_image, split_into_blocks
from .color import level_shift, rgb_planes_to_ycbcr
from .entropy import zigzag_scan
from .errors import CodecError
from .metrics import QualityReport, compression_ratio, mse, psnr_from_mse
from .quantize import default_table, quantize_block, scaled_table
from .transform import dct2_fast


def _read(path: str) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _write(path: str, data: bytes) -> None:
    with open(path, "wb") as f:
        f.write(data)


def _print_matrix(values, out) -> None:
    values = np.asarray(values).reshape(8, 8)
    for row in values:
        if values.dtype.kind == "f":
            out.write(" ".join(f"{v:.3f}" for v in row) + "\n")
        else:
            out.write(" ".join(str(int(v)) for v in row) + "\n")


def cmd_encode(args, out) -> None:
    original = pnm.read_pnm(_read(args.input))
    params = EncodeParams(args.quality, args.subsample)
    data = encode_image(original, params, workers=args.workers)
    _write(args.output, data)
    report = QualityReport.measure(original, decode_image(data), len(data))
    out.write((report.to_json() if args.json else report.to_text()) + "\n")


def cmd_decode(args, out) -> None:
    decoded = decode_image(_read(args.input))
    _write(args.output, pnm.write_pnm(decoded))


def cmd_metrics(args, out) -> None:
    if args.sizes:
        n1, n2 = args.sizes
        out.write(f"cr={compression_ratio(n1, n2):.6f}\n")
        return
    if len(args.images) != 2:
        raise _UsageError("metrics needs two images or --sizes N1 N2")
    a, b = (pnm.read_pnm(_read(p)) for p in args.images)
    err = mse(a, b)
    value = psnr_from_mse(err)
    out.write(f"mse={err:.6f}\n")
    out.write("psnr=inf\n" if value == float("inf") else f"psnr={value:.6f}\n")


def cmd_inspect(args, out) -> None:
    img = pnm.read_pnm(_read(args.input))
    planes = img.planes if img.channels == 1 else rgb_planes_to_ycbcr(img.planes)
    if not 0 <= args.component < len(planes):
        raise _UsageError(f"component must be in 0..{len(planes) - 1}")
    grid = split_into_blocks(level_shift(planes[args.component], "forward"))
    row, col = args.block
    if not (0 <= row < grid.blocks_per_col and 0 <= col < grid.blocks_per_row):
        raise _UsageError(f"block {row},{col} outside the "
                          f"{grid.blocks_per_col}x{grid.blocks_per_row} grid")
    coeffs = dct2_fast(grid.blocks[row, col])
    if args.stage == "dct":
        _print_matrix(coeffs, out)
        return
    role = "luminance" if args.component == 0 else "chrominance"
    q = quantize_block(coeffs, scaled_table(default_table(role), args.quality))
    _print_matrix(q if args.stage == "quant" else zigzag_scan(q), out)


class _UsageError(Exception):
    pass


def _block(text: str) -> tuple[int, int]:
    try:
        r, c = text.split(",")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected R,C, got {text!r}") from None


def _quality(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 100:
        raise argparse.ArgumentTypeError("quality must be in 1..100")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dctjpeg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="compress a PGM/PPM file to JPEG")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--quality", type=_quality, default=50)
    p.add_argument("--subsample", choices=["444", "420"], default="444")
    p.add_argument("--workers", type=int, default=1, help="threads for the block transforms")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decompress a baseline JPEG file to PGM/PPM")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("metrics", help="MSE/PSNR between two images, or CR from sizes")
    p.add_argument("images", nargs="*")
    p.add_argument("--sizes", nargs=2, type=int, metavar=("N1", "N2"))
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("inspect", help="dump one block at an intermediate stage")
    p.add_argument("input")
    p.add_argument("--stage", choices=["dct", "quant", "zigzag"], required=True)
    p.add_argument("--block", type=_block, default=(0, 0), metavar="R,C")
    p.add_argument("--component", type=int, default=0, help="0=Y, 1=Cb, 2=Cr")
    p.add_argument("--quality", type=_quality, default=50)
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except _UsageError as exc:
        err.write(f"dctjpeg: error: {exc}\n")
        return 2
    except (CodecError, ValueError, ZeroDivisionError, OSError) as exc:
        err.write(f"dctjpeg: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
