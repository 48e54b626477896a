"""Binary PGM (P5) and PPM (P6) reading and writing, 8-bit only."""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import ChaosJpegError


class NetpbmError(ChaosJpegError, ValueError):
    pass


_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def _header_tokens(data, count):
    pos = 0
    tokens = []
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise NetpbmError("truncated netpbm header")
        tokens.append(m.group(1))
        pos = m.end()
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos:pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise NetpbmError("missing whitespace after netpbm header")
    return tokens, pos + 1


def decode_netpbm(data: bytes) -> np.ndarray:
    """Decode P5/P6 bytes to an (H, W) or (H, W, 3) uint8 array."""
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise NetpbmError(f"unsupported netpbm magic {magic!r}; only P5 and P6 are read")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise NetpbmError("non-numeric netpbm header field") from None
    if width <= 0 or height <= 0:
        raise NetpbmError("netpbm dimensions must be positive")
    if maxval != 255:
        raise NetpbmError(f"only maxval 255 is supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    size = width * height * channels
    raster = data[offset:offset + size]
    if len(raster) != size:
        raise NetpbmError(f"raster truncated: expected {size} bytes, got {len(raster)}")
    arr = np.frombuffer(raster, dtype=np.uint8)
    shape = (height, width, 3) if channels == 3 else (height, width)
    return arr.reshape(shape).copy()


def encode_netpbm(img) -> bytes:
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise NetpbmError("netpbm output requires uint8 samples")
    if img.ndim == 2:
        magic = b"P5"
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
    else:
        raise NetpbmError(f"cannot store an array of shape {img.shape}")
    h, w = img.shape[:2]
    return magic + f"\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def read_netpbm(path) -> np.ndarray:
    return decode_netpbm(Path(path).read_bytes())


def write_netpbm(path, img):
    Path(path).write_bytes(encode_netpbm(img))
