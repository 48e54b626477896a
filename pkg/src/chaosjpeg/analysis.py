"""Security and fidelity metrics for ciphertext JPEGs.

The four sketch attacks read one scalar feature per 8x8 block straight out
of the coefficient domain and render it as a block-resolution grayscale map:

    DCM  magnitude category of the DC coefficient
    NCC  number of nonzero AC coefficients
    EAC  energy of the AC coefficients (log-scaled for display)
    PLZ  zigzag position of the last nonzero coefficient

On a plaintext JPEG these maps show object contours. ``leak_score`` is the
Pearson correlation between a plaintext map and a ciphertext map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GridMismatch
from .jpeg.codec import CoefficientPlane
from .jpeg.transform import rgb_to_ycbcr_float

ATTACK_KINDS = ("dcm", "ncc", "eac", "plz")


def channel_entropy(samples) -> float:
    """Shannon entropy in bits of an 8-bit channel's 256-bin histogram."""
    samples = np.asarray(samples)
    if samples.size == 0:
        raise ValueError("entropy of an empty channel is undefined")
    counts = np.bincount(samples.astype(np.uint8).ravel(), minlength=256)
    p = counts[counts > 0] / samples.size
    return float(max(0.0, -(p * np.log2(p)).sum()))


def psnr(a, b, space="rgb") -> float:
    """Peak signal-to-noise ratio in dB with peak 255; ``inf`` for identical inputs.

    With ``space="ycbcr"`` RGB inputs are first converted to full-resolution
    JFIF Y, Cb, Cr and the error is averaged over those three components.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if space == "ycbcr":
        if a.ndim != 3 or a.shape[2] != 3:
            raise DimensionMismatch("YCbCr PSNR needs RGB images")
        a = np.stack(rgb_to_ycbcr_float(a), axis=-1)
        b = np.stack(rgb_to_ycbcr_float(b), axis=-1)
    elif space != "rgb":
        raise ValueError(f"unknown color space {space!r}")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(255.0 ** 2 / mse))


@dataclass
class AttackMap:
    """One feature per block plus its [0, 255] display intensity."""

    kind: str
    features: np.ndarray
    intensities: np.ndarray

    @property
    def shape(self):
        return self.intensities.shape

    def upscaled(self, factor=8) -> np.ndarray:
        """Nearest-neighbour enlargement, e.g. back to pixel resolution."""
        return np.kron(self.intensities, np.ones((factor, factor), dtype=np.uint8))


def _to_intensity(values):
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def _coefs(plane):
    return plane.coefs if isinstance(plane, CoefficientPlane) else np.asarray(plane)


def attack_dcm(plane) -> AttackMap:
    dc = np.abs(_coefs(plane)[..., 0]).astype(np.float64)
    cat = np.frexp(dc)[1]
    return AttackMap("dcm", cat, _to_intensity(cat * 255.0 / 11.0))


def attack_ncc(plane) -> AttackMap:
    count = np.count_nonzero(_coefs(plane)[..., 1:], axis=-1)
    return AttackMap("ncc", count, _to_intensity(count * 255.0 / 63.0))


def attack_eac(plane) -> AttackMap:
    ac = _coefs(plane)[..., 1:].astype(np.float64)
    energy = (ac ** 2).sum(axis=-1)
    top = energy.max(initial=0.0)
    if top == 0:
        scaled = np.zeros_like(energy)
    else:
        scaled = 255.0 * np.log1p(energy) / np.log1p(top)
    return AttackMap("eac", energy, _to_intensity(scaled))


def attack_plz(plane) -> AttackMap:
    coefs = _coefs(plane)
    nonzero = coefs != 0
    # index of the last True along the block axis, 0 when the block is empty
    last = 63 - np.argmax(nonzero[..., ::-1], axis=-1)
    last = np.where(nonzero.any(axis=-1), last, 0)
    return AttackMap("plz", last, _to_intensity(last * 255.0 / 63.0))


ATTACKS = {
    "dcm": attack_dcm,
    "ncc": attack_ncc,
    "eac": attack_eac,
    "plz": attack_plz,
}


def run_attack(kind, plane) -> AttackMap:
    try:
        return ATTACKS[kind](plane)
    except KeyError:
        raise ValueError(f"unknown attack {kind!r}; choose from {', '.join(ATTACK_KINDS)}") from None


def leak_score(map_plain: AttackMap, map_cipher: AttackMap) -> float:
    """Pearson correlation of two attack maps over the same block grid."""
    a = np.asarray(map_plain.intensities, dtype=np.float64)
    b = np.asarray(map_cipher.intensities, dtype=np.float64)
    if a.shape != b.shape:
        raise GridMismatch(f"attack maps differ in shape: {a.shape} vs {b.shape}")
    a = a.ravel() - a.mean()
    b = b.ravel() - b.mean()
    denom = math.sqrt(float((a * a).sum()) * float((b * b).sum()))
    if denom == 0:
        return 0.0
    return float((a * b).sum() / denom)
