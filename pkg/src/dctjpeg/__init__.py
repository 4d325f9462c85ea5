"""Baseline JPEG codec: DCT, quantization, Huffman coding and JFIF I/O."""
from ._kernels import backend
from .codec import EncodeParams, decode_image, encode_image
from .errors import CodecError, JpegError, PnmError
from .image import RasterImage, load, read_pnm, save, write_pnm
from .metrics import QualityReport, compression_ratio, mse, psnr

__all__ = [
    "CodecError", "EncodeParams", "JpegError", "PnmError", "QualityReport", "RasterImage",
    "backend", "compression_ratio", "decode_image", "encode_image", "mse", "psnr",
    "load", "read_pnm", "save", "write_pnm",
]
__version__ = "0.1.0"
