"""Compare the compiled and pure-Python scan kernels, and the two DCT paths.

    python3 benchmarks/bench_kernels.py [--size 512] [--repeat 3]
"""
import argparse
import time
from pathlib import Path

import numpy as np

from dctjpeg import _kernels
from dctjpeg.codec import EncodeParams, decode_image, encode_image
from dctjpeg.image import load
from dctjpeg.transform import dct2_direct, dct2_fast

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    img = load(DATA / "astronaut.ppm")
    if args.size < img.width:
        img = type(img)(img.planes[:, :args.size, :args.size])
    data = encode_image(img)
    print(f"image {img.width}x{img.height}x{img.channels}, {len(data)} bytes at quality 50")
    print(f"{'backend':10s} {'encode s':>10s} {'decode s':>10s}")
    results = {}
    for name in sorted(_kernels.BACKENDS):
        _kernels.use_backend(name)
        enc = best_of(lambda: encode_image(img, EncodeParams()), args.repeat)
        dec = best_of(lambda: decode_image(data), args.repeat)
        results[name] = (enc, dec)
        print(f"{name:10s} {enc:10.4f} {dec:10.4f}")
    if len(results) == 2:
        (pe, pd), (ce, cd) = results["python"], results["cython"]
        print(f"speedup    {pe / ce:9.1f}x {pd / cd:9.1f}x")

    rng = np.random.default_rng(0)
    blocks = rng.uniform(-128, 127, size=(200, 8, 8))
    direct = best_of(lambda: [dct2_direct(b) for b in blocks], 1) / len(blocks)
    many = rng.uniform(-128, 127, size=(100_000, 8, 8))
    fast = best_of(lambda: dct2_fast(many), args.repeat) / len(many)
    print(f"dct per block: direct {direct * 1e6:.1f} us, fast {fast * 1e6:.3f} us "
          f"({direct / fast:.0f}x)")


if __name__ == "__main__":
    main()
