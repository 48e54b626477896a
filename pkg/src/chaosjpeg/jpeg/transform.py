"""Pixel-domain side of the codec: color, subsampling, 8x8 blocks, DCT, quantization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .tables import UNZIGZAG, ZIGZAG, QuantTable

BLOCK = 8


@dataclass
class YCbCrPlanes:
    """Full-resolution luma and 4:2:2 chroma (half width, full height)."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray

    @property
    def width(self):
        return self.y.shape[1]

    @property
    def height(self):
        return self.y.shape[0]


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.copysign(np.floor(np.abs(x) + 0.5), x)


def clamp_samples(samples) -> np.ndarray:
    """Clamp to [0, 255] and round to the nearest integer."""
    return np.clip(round_half_away(samples), 0, 255).astype(np.uint8)


def rgb_to_ycbcr_float(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0
    cr = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0
    return y, cb, cr


def ycbcr_to_rgb_float(y, cb, cr):
    y = np.asarray(y, dtype=np.float64)
    cb = np.asarray(cb, dtype=np.float64) - 128.0
    cr = np.asarray(cr, dtype=np.float64) - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return np.stack([r, g, b], axis=-1)


def subsample_422(plane) -> np.ndarray:
    """Average horizontal pixel pairs; an odd last column pairs with itself."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.shape[1] % 2:
        plane = np.concatenate([plane, plane[:, -1:]], axis=1)
    return (plane[:, 0::2] + plane[:, 1::2]) / 2.0


def upsample_422(plane, width) -> np.ndarray:
    return np.repeat(plane, 2, axis=1)[:, :width]


def rgb_to_ycbcr(img) -> YCbCrPlanes:
    """JFIF full-range conversion followed by 4:2:2 chroma subsampling."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("expected an H x W x 3 RGB image")
    y, cb, cr = rgb_to_ycbcr_float(img)
    return YCbCrPlanes(
        clamp_samples(y),
        clamp_samples(subsample_422(cb)),
        clamp_samples(subsample_422(cr)),
    )


def ycbcr_to_rgb(planes: YCbCrPlanes) -> np.ndarray:
    w = planes.width
    rgb = ycbcr_to_rgb_float(
        planes.y, upsample_422(planes.cb, w), upsample_422(planes.cr, w)
    )
    return clamp_samples(rgb)


def split_blocks(plane) -> np.ndarray:
    """Cut a plane into (blocks_h, blocks_w, 8, 8), replicate-padding the edges."""
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    ph, pw = -h % BLOCK, -w % BLOCK
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    bh, bw = plane.shape[0] // BLOCK, plane.shape[1] // BLOCK
    return plane.reshape(bh, BLOCK, bw, BLOCK).swapaxes(1, 2)


def merge_blocks(blocks, height=None, width=None) -> np.ndarray:
    bh, bw = blocks.shape[:2]
    plane = blocks.swapaxes(1, 2).reshape(bh * BLOCK, bw * BLOCK)
    return plane[: height or plane.shape[0], : width or plane.shape[1]]


def forward_blocks(blocks, q: QuantTable) -> np.ndarray:
    """Level shift, orthonormal 2-D DCT-II, quantize, zigzag.

    ``blocks`` has shape (..., 8, 8); the result has shape (..., 64) int32.
    """
    blocks = np.asarray(blocks, dtype=np.float64)
    coefs = dctn(blocks - 128.0, type=2, norm="ortho", axes=(-2, -1))
    flat = coefs.reshape(*coefs.shape[:-2], 64)[..., ZIGZAG]
    return round_half_away(flat / q.array).astype(np.int32)


def inverse_blocks(coefs, q: QuantTable) -> np.ndarray:
    """Dequantize and inverse DCT; samples are returned unclamped."""
    coefs = np.asarray(coefs, dtype=np.float64) * q.array
    natural = coefs[..., UNZIGZAG].reshape(*coefs.shape[:-1], BLOCK, BLOCK)
    return idctn(natural, type=2, norm="ortho", axes=(-2, -1)) + 128.0


def forward_block(pixels, q: QuantTable) -> np.ndarray:
    return forward_blocks(np.asarray(pixels).reshape(BLOCK, BLOCK), q)


def inverse_block(coefs, q: QuantTable) -> np.ndarray:
    return inverse_blocks(np.asarray(coefs).reshape(64), q)
