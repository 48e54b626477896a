"""Baseline JPEG machinery exposing the quantized coefficient domain."""

from .codec import (
    CoefficientImage,
    CoefficientPlane,
    category,
    dc_range_violations,
    decode_jpeg,
    encode_jpeg,
)
from .image import DEFAULT_QF, compress, component_samples, quant_tables, reconstruct, render
from .tables import CHROMINANCE, LUMINANCE, QuantTable, quant_table_for_qf
from .transform import (
    YCbCrPlanes,
    clamp_samples,
    forward_block,
    forward_blocks,
    inverse_block,
    inverse_blocks,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)

__all__ = [
    "CHROMINANCE",
    "DEFAULT_QF",
    "LUMINANCE",
    "CoefficientImage",
    "CoefficientPlane",
    "QuantTable",
    "YCbCrPlanes",
    "category",
    "clamp_samples",
    "component_samples",
    "compress",
    "dc_range_violations",
    "decode_jpeg",
    "encode_jpeg",
    "forward_block",
    "forward_blocks",
    "inverse_block",
    "inverse_blocks",
    "quant_table_for_qf",
    "quant_tables",
    "reconstruct",
    "render",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
]
