"""Coefficient-domain JPEG cipher.

Encryption of one component plane:

1. Block permutation (driven by the logistic stream): the blocks of every
   block row are shuffled among themselves, then all blocks of the plane are
   shuffled once more. Whole 64-coefficient blocks move, so DC values stay
   in range and per-block features (nonzero count, last nonzero position)
   are displaced together with their DC.
2. AC XOR (driven by the Henon ECU stream): for the nonzero AC coefficient
   at zigzag position q of block p, ECU (p, q) supplies one sign bit and the
   bits XORed into the magnitude below its leading 1. The JPEG magnitude
   category and the zero/nonzero pattern never change.

Decryption undoes the AC XOR first (it is an involution), then the block
permutation. Components are processed Y, Cb, Cr from one continuous logistic
stream and one continuous ECU stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chaos import ECU_BITS, EcuStream, EncryptionKey, derive_permutation, invert_permutation
from .errors import AlphaOutOfRange, EcuExhausted, GridMismatch, ImageTooLarge
from .jpeg import (
    DEFAULT_QF,
    CoefficientImage,
    CoefficientPlane,
    clamp_samples,
    compress,
    dc_range_violations,
    decode_jpeg,
    encode_jpeg,
    inverse_blocks,
    reconstruct,
    render,
)
from .jpeg.transform import round_half_away

MAX_DIM = 2048

# weights of ECU bits 2..11 when read as one 10-bit number
_ECU_TAIL_WEIGHTS = 1 << np.arange(ECU_BITS - 2, -1, -1, dtype=np.int64)


@dataclass
class BlockPermutationPlan:
    """One permutation per block row, then one over the whole grid.

    Permutations are gather indices: after the row step, position ``j`` of
    row ``r`` holds the block that was at ``row_perms[r, j]``.
    """

    row_perms: np.ndarray
    global_perm: np.ndarray

    @property
    def blocks_h(self):
        return self.row_perms.shape[0]

    @property
    def blocks_w(self):
        return self.row_perms.shape[1]

    def inverse_rows(self):
        return np.argsort(self.row_perms, axis=1, kind="stable")

    def inverse_global(self):
        return invert_permutation(self.global_perm)


class _ArraySource:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)
        self.pos = 0

    def take(self, n):
        out = self.values[self.pos:self.pos + n]
        self.pos += n
        return out


def _as_source(source):
    if isinstance(source, EncryptionKey):
        return source.logistic_stream()
    # ndarrays have a .take method of their own, so test for them first
    if isinstance(source, (np.ndarray, list, tuple)):
        return _ArraySource(source)
    if hasattr(source, "take"):
        return source
    return _ArraySource(source)


def plan_permutations(source, blocks_w, blocks_h) -> BlockPermutationPlan:
    """Draw a plan from ``source``: a key, a logistic stream, or a plain sequence.

    Consumes ``blocks_h`` runs of ``blocks_w`` values (row permutations)
    followed by ``blocks_w * blocks_h`` values (global permutation).
    """
    src = _as_source(source)
    rows = np.empty((blocks_h, blocks_w), dtype=np.int64)
    for r in range(blocks_h):
        rows[r] = derive_permutation(src.take(blocks_w), blocks_w)
    n = blocks_w * blocks_h
    return BlockPermutationPlan(rows, derive_permutation(src.take(n), n))


def _check_grid(plane, plan):
    if (plane.blocks_h, plane.blocks_w) != (plan.blocks_h, plan.blocks_w):
        raise GridMismatch(
            f"plan is {plan.blocks_w}x{plan.blocks_h} blocks, "
            f"plane is {plane.blocks_w}x{plane.blocks_h}"
        )


def encrypt_dc_blocks(plane: CoefficientPlane, plan: BlockPermutationPlan) -> CoefficientPlane:
    _check_grid(plane, plan)
    rows = np.take_along_axis(plane.coefs, plan.row_perms[:, :, None], axis=1)
    flat = rows.reshape(-1, 64)[plan.global_perm]
    return plane.copy(flat.reshape(plane.coefs.shape))


def decrypt_dc_blocks(plane: CoefficientPlane, plan: BlockPermutationPlan) -> CoefficientPlane:
    _check_grid(plane, plan)
    flat = plane.coefs.reshape(-1, 64)[plan.inverse_global()]
    rows = flat.reshape(plane.coefs.shape)
    out = np.take_along_axis(rows, plan.inverse_rows()[:, :, None], axis=1)
    return plane.copy(out)


def encrypt_ac(plane: CoefficientPlane, ecus: EcuStream, first_group=0) -> CoefficientPlane:
    """XOR every nonzero AC coefficient with its ECU; an involution.

    Block ``p`` (raster order) uses ECU group ``first_group + p``. The sign
    is flipped by ECU bit 1; the ``l - 1`` magnitude bits under the leading
    1 are XORed with ECU bits 2..l, where ``l`` is the magnitude category.
    """
    n = plane.n_blocks
    if first_group + n > len(ecus):
        raise EcuExhausted(
            f"{plane.component} needs ECU groups {first_group}..{first_group + n}, "
            f"stream has {len(ecus)}"
        )
    groups = ecus.groups[first_group:first_group + n].astype(np.int64)
    ac = plane.flat()[:, 1:].astype(np.int64)
    mag = np.abs(ac)
    cat = np.frexp(mag.astype(np.float64))[1]
    if cat.max(initial=0) > ECU_BITS:
        raise ValueError("AC magnitude does not fit an 11-bit ECU")
    tail = groups[:, :, 1:] @ _ECU_TAIL_WEIGHTS
    new_mag = mag ^ (tail >> np.maximum(ECU_BITS - cat, 0))
    negative = (ac < 0) ^ (groups[:, :, 0] == 1)
    new_ac = np.where(mag > 0, np.where(negative, -new_mag, new_mag), 0)
    flat = plane.flat().copy()
    flat[:, 1:] = new_ac
    return plane.copy(flat.reshape(plane.coefs.shape))


decrypt_ac = encrypt_ac


def check_dc_range(plane: CoefficientPlane):
    """Raster indices of blocks whose quantized DC leaves [-1024, 1016]."""
    return dc_range_violations(plane)


def clamp_spatial(samples) -> np.ndarray:
    """Pixels below 0 become 0, above 255 become 255, the rest round to integers."""
    return clamp_samples(samples)


def overflow_blocks(plane: CoefficientPlane, q) -> list:
    """Raster indices of blocks whose decoded samples leave [0, 255]."""
    samples = inverse_blocks(plane.coefs, q).reshape(plane.n_blocks, 64)
    # tolerate the rounding that a decoder applies anyway
    bad = (samples < -0.5) | (samples >= 255.5)
    return np.flatnonzero(bad.any(axis=1)).tolist()


def alpha_scale_blocks(plane: CoefficientPlane, alpha, blocks) -> CoefficientPlane:
    """Shrink every AC coefficient of the listed blocks by ``alpha``.

    The overflow treatment this package compares against; rounding is half
    away from zero, so small coefficients collapse to 0.
    """
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1), got {alpha!r}")
    flat = plane.flat().copy()
    idx = np.asarray(list(blocks), dtype=np.int64)
    if idx.size:
        flat[idx, 1:] = round_half_away(alpha * flat[idx, 1:]).astype(flat.dtype)
    return plane.copy(flat.reshape(plane.coefs.shape))


# -- whole images ---------------------------------------------------------------

@dataclass
class CiphertextImage:
    """A baseline JFIF byte stream plus the metadata read from it."""

    data: bytes
    width: int
    height: int
    quality: int
    sampling: tuple

    @classmethod
    def from_bytes(cls, data, quality=DEFAULT_QF):
        ci = decode_jpeg(data)
        return cls(bytes(data), ci.width, ci.height, quality, tuple(ci.sampling))

    @classmethod
    def from_coefficients(cls, ci: CoefficientImage, quality=DEFAULT_QF):
        return cls(encode_jpeg(ci), ci.width, ci.height, quality, tuple(ci.sampling))

    @classmethod
    def read(cls, path, quality=DEFAULT_QF):
        return cls.from_bytes(Path(path).read_bytes(), quality)

    def coefficients(self) -> CoefficientImage:
        return decode_jpeg(self.data)

    def render(self) -> np.ndarray:
        return render(self.coefficients())


@dataclass
class ComponentKeys:
    plan: BlockPermutationPlan
    first_group: int


def derive_keystreams(key: EncryptionKey, image: CoefficientImage):
    """Per-component permutation plans and ECU offsets, plus the ECU stream.

    Both streams run continuously across Y, Cb, Cr.
    """
    logistic = key.logistic_stream()
    keys = []
    offset = 0
    for plane in image.planes:
        keys.append(ComponentKeys(plan_permutations(logistic, plane.blocks_w, plane.blocks_h), offset))
        offset += plane.n_blocks
    ecus = key.henon_stream().ecus(offset)
    return keys, ecus


def encrypt_coefficients(image: CoefficientImage, key: EncryptionKey, dc=True, ac=True) -> CoefficientImage:
    """Encrypt every component; ``dc``/``ac`` switch the two layers for ablations."""
    keys, ecus = derive_keystreams(key, image)
    out = image.copy()
    for i, (plane, ck) in enumerate(zip(image.planes, keys)):
        if dc:
            plane = encrypt_dc_blocks(plane, ck.plan)
        if ac:
            plane = encrypt_ac(plane, ecus, ck.first_group)
        out.planes[i] = plane
    return out


def decrypt_coefficients(image: CoefficientImage, key: EncryptionKey, dc=True, ac=True) -> CoefficientImage:
    keys, ecus = derive_keystreams(key, image)
    out = image.copy()
    for i, (plane, ck) in enumerate(zip(image.planes, keys)):
        if ac:
            plane = decrypt_ac(plane, ecus, ck.first_group)
        if dc:
            plane = decrypt_dc_blocks(plane, ck.plan)
        out.planes[i] = plane
    return out


def repair_overflow(image: CoefficientImage, qf=DEFAULT_QF) -> CoefficientImage:
    """Decode, clamp the pixels into [0, 255] and re-encode at ``qf``."""
    return compress(clamp_spatial(reconstruct(image)), qf)


def _check_size(width, height):
    if width >= MAX_DIM or height >= MAX_DIM:
        raise ImageTooLarge(
            f"{width}x{height} is not below the {MAX_DIM}x{MAX_DIM} no-resize limit"
        )


def encrypt_image(img, key: EncryptionKey, qf=DEFAULT_QF) -> CiphertextImage:
    """Compress at ``qf``, encrypt, repair overflow, and emit a baseline JPEG."""
    img = np.asarray(img)
    _check_size(img.shape[1], img.shape[0])
    encrypted = encrypt_coefficients(compress(img, qf), key)
    return CiphertextImage.from_coefficients(repair_overflow(encrypted, qf), qf)


def decrypt_coefficients_from(ct, key: EncryptionKey) -> CoefficientImage:
    data = ct.data if isinstance(ct, CiphertextImage) else ct
    return decrypt_coefficients(decode_jpeg(data), key)


def decrypt_image(ct, key: EncryptionKey) -> np.ndarray:
    """Recover the 8-bit image from ciphertext bytes or a :class:`CiphertextImage`.

    A wrong key is not detected; it decrypts to noise.
    """
    return render(decrypt_coefficients_from(ct, key))
