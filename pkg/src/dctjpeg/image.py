"""Uncompressed raster images and binary PGM/PPM (P5/P6) I/O."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PnmError

_WHITESPACE = b" \t\n\r\v\f"


@dataclass(eq=False)
class RasterImage:
    """Planar 8-bit image. ``planes`` has shape (channels, height, width)."""

    planes: np.ndarray

    def __post_init__(self):
        planes = np.asarray(self.planes)
        if planes.ndim != 3 or planes.shape[0] not in (1, 3):
            raise ValueError(f"expected (1|3, H, W) planes, got shape {planes.shape}")
        if planes.shape[1] < 1 or planes.shape[2] < 1:
            raise ValueError("image must be at least 1x1")
        if planes.dtype != np.uint8:
            if planes.size and (planes.min() < 0 or planes.max() > 255):
                raise ValueError("samples must lie in [0, 255]")
            planes = planes.astype(np.uint8)
        self.planes = np.ascontiguousarray(planes)

    @classmethod
    def from_array(cls, array) -> RasterImage:
        """Build from an (H, W) grayscale or interleaved (H, W, 3) array."""
        array = np.asarray(array)
        if array.ndim == 2:
            return cls(array[None])
        if array.ndim == 3 and array.shape[2] == 3:
            return cls(np.moveaxis(array, 2, 0))
        raise ValueError(f"unsupported array shape {array.shape}")

    def to_array(self) -> np.ndarray:
        if self.channels == 1:
            return self.planes[0].copy()
        return np.ascontiguousarray(np.moveaxis(self.planes, 0, 2))

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.planes.shape == other.planes.shape and bool(
            np.array_equal(self.planes, other.planes)
        )

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}, channels={self.channels})"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments up to end of line
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise PnmError("truncated header", start)
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, end = _next_token(data, pos)
    if not token.isdigit():
        raise PnmError(f"bad {what} {token!r}", end - len(token))
    return int(token), end


def read_pnm(data: bytes) -> RasterImage:
    """Parse a binary PGM (P5) or PPM (P6) file with maxval 255."""
    data = bytes(data)
    magic = data[:2]
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmError(f"unsupported magic number {magic!r}", 0)
    pos = 2
    width, pos = _header_int(data, pos, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise PnmError(f"invalid dimensions {width}x{height}", 2)
    if maxval != 255:
        raise PnmError(f"maxval {maxval} unsupported, only 255", pos)
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise PnmError("missing whitespace after maxval", pos)
    pos += 1
    size = width * height * channels
    if len(data) - pos < size:
        raise PnmError(f"truncated pixel data: need {size} bytes, have {len(data) - pos}", len(data))
    pixels = np.frombuffer(data, dtype=np.uint8, count=size, offset=pos)
    if channels == 1:
        return RasterImage(pixels.reshape((1, height, width)))
    return RasterImage.from_array(pixels.reshape((height, width, 3)))


def write_pnm(image: RasterImage) -> bytes:
    magic = b"P5" if image.channels == 1 else b"P6"
    header = magic + b"\n%d %d\n255\n" % (image.width, image.height)
    return header + image.to_array().tobytes()


def load(path) -> RasterImage:
    with open(path, "rb") as f:
        return read_pnm(f.read())


def save(image: RasterImage, path) -> None:
    with open(path, "wb") as f:
        f.write(write_pnm(image))
