"""Whole-image compression and rendering on top of the block transforms."""

from __future__ import annotations

import numpy as np

from .codec import COMPONENT_NAMES, SAMPLING_422, CoefficientImage, CoefficientPlane
from .tables import CHROMINANCE, LUMINANCE, quant_table_for_qf
from .transform import (
    clamp_samples,
    forward_blocks,
    inverse_blocks,
    merge_blocks,
    rgb_to_ycbcr,
    split_blocks,
    ycbcr_to_rgb_float,
)

DEFAULT_QF = 71


def quant_tables(qf=DEFAULT_QF):
    """(luminance, chrominance) tables at quality ``qf``."""
    return quant_table_for_qf(LUMINANCE, qf), quant_table_for_qf(CHROMINANCE, qf)


def plane_from_samples(name, samples, q) -> CoefficientPlane:
    samples = np.asarray(samples)
    coefs = forward_blocks(split_blocks(samples), q)
    return CoefficientPlane(name, coefs, samples.shape[1], samples.shape[0])


def compress(img, qf=DEFAULT_QF) -> CoefficientImage:
    """Quantized coefficients of an 8-bit gray (H, W) or RGB (H, W, 3) image."""
    img = np.asarray(img)
    qy, qc = quant_tables(qf)
    h, w = img.shape[:2]
    if img.ndim == 2:
        return CoefficientImage(w, h, [plane_from_samples("Y", img, qy)], [qy], ((1, 1),))
    planes = rgb_to_ycbcr(img)
    samples = (planes.y, planes.cb, planes.cr)
    tables = [qy, qc, qc]
    coded = [plane_from_samples(n, s, q) for n, s, q in zip(COMPONENT_NAMES, samples, tables)]
    return CoefficientImage(w, h, coded, tables, SAMPLING_422)


def component_samples(image: CoefficientImage):
    """Unclamped spatial samples of each component at its own resolution."""
    return [
        merge_blocks(inverse_blocks(p.coefs, q), p.height, p.width)
        for p, q in zip(image.planes, image.qtables)
    ]


def reconstruct(image: CoefficientImage) -> np.ndarray:
    """Unclamped spatial image: IDCT, replicate-upsample chroma, convert to RGB."""
    samples = component_samples(image)
    if len(samples) == 1:
        return samples[0]
    hmax = max(h for h, _ in image.sampling)
    vmax = max(v for _, v in image.sampling)
    full = []
    for s, (h, v) in zip(samples, image.sampling):
        s = np.repeat(np.repeat(s, vmax // v, axis=0), hmax // h, axis=1)
        full.append(s[: image.height, : image.width])
    return ycbcr_to_rgb_float(*full)


def render(image: CoefficientImage) -> np.ndarray:
    """What a viewer shows: the reconstruction clamped to 8-bit samples."""
    return clamp_samples(reconstruct(image))
