"""Stand-in for a social network's upload processing.

The platform is modelled only by what was measured for it: images at or
beyond 2048 pixels in either dimension are resized (not modelled here, so
rejected), everything else is decoded to clamped 8-bit RGB and recompressed
at quality 71 with 4:2:2 chroma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cipher import CiphertextImage
from .errors import DimensionMismatch, Unsupported
from .jpeg import compress, decode_jpeg, encode_jpeg, render
from .jpeg.codec import probe_jpeg


@dataclass(frozen=True)
class PlatformPolicy:
    recompress_qf: int = 71
    sampling: str = "4:2:2"
    max_dim: int = 2048

    def __post_init__(self):
        if not 1 <= self.recompress_qf <= 100:
            raise ValueError(f"recompress_qf must be in 1..100, got {self.recompress_qf}")
        if self.sampling != "4:2:2":
            raise ValueError("only 4:2:2 recompression is modelled")


def _as_bytes(upload):
    return upload.data if isinstance(upload, CiphertextImage) else bytes(upload)


def platform_process(upload, policy: PlatformPolicy = PlatformPolicy()) -> CiphertextImage:
    data = _as_bytes(upload)
    width, height, _ = probe_jpeg(data)
    if width >= policy.max_dim or height >= policy.max_dim:
        raise Unsupported(
            f"{width}x{height} upload would be resized by the platform; "
            f"only images below {policy.max_dim}x{policy.max_dim} are modelled"
        )
    pixels = render(decode_jpeg(data))
    recompressed = compress(pixels, policy.recompress_qf)
    return CiphertextImage(
        encode_jpeg(recompressed),
        width,
        height,
        policy.recompress_qf,
        tuple(recompressed.sampling),
    )


@dataclass
class ComponentSurvival:
    component: str
    total: int
    identical: int
    category_changes: int
    zero_flips: int

    @property
    def changed(self):
        return self.total - self.identical

    @property
    def fraction_identical(self):
        return self.identical / self.total if self.total else 1.0


@dataclass
class SurvivalReport:
    components: list = field(default_factory=list)

    @property
    def fraction_identical(self):
        total = sum(c.total for c in self.components)
        same = sum(c.identical for c in self.components)
        return same / total if total else 1.0

    def lines(self):
        out = []
        for c in self.components:
            out.append(
                f"{c.component}: {c.identical}/{c.total} coefficients identical "
                f"({100 * c.fraction_identical:.2f}%), "
                f"{c.category_changes} category changes, {c.zero_flips} zero/nonzero flips"
            )
        out.append(f"overall: {100 * self.fraction_identical:.2f}% identical")
        return out

    def key_values(self):
        pairs = []
        for c in self.components:
            name = c.component.lower()
            pairs += [
                (f"{name}.total", c.total),
                (f"{name}.identical", c.identical),
                (f"{name}.fraction_identical", f"{c.fraction_identical:.6f}"),
                (f"{name}.category_changes", c.category_changes),
                (f"{name}.zero_flips", c.zero_flips),
            ]
        pairs.append(("overall.fraction_identical", f"{self.fraction_identical:.6f}"))
        return pairs

    def format(self):
        return "\n".join(self.lines() + [f"{k}={v}" for k, v in self.key_values()]) + "\n"


def survival_report(before, after) -> SurvivalReport:
    """Per-component comparison of the quantized coefficients of two JPEGs."""
    a = decode_jpeg(_as_bytes(before))
    b = decode_jpeg(_as_bytes(after))
    if (a.width, a.height, len(a.planes)) != (b.width, b.height, len(b.planes)):
        raise DimensionMismatch(
            f"cannot compare {a.width}x{a.height}/{len(a.planes)} with "
            f"{b.width}x{b.height}/{len(b.planes)}"
        )
    report = SurvivalReport()
    for pa, pb in zip(a.planes, b.planes):
        if pa.coefs.shape != pb.coefs.shape:
            raise DimensionMismatch(f"{pa.component} planes have different block grids")
        x = pa.coefs.astype(np.int64)
        y = pb.coefs.astype(np.int64)
        cat_x = np.frexp(np.abs(x).astype(np.float64))[1]
        cat_y = np.frexp(np.abs(y).astype(np.float64))[1]
        report.components.append(
            ComponentSurvival(
                pa.component,
                int(x.size),
                int((x == y).sum()),
                int((cat_x != cat_y).sum()),
                int(((x == 0) != (y == 0)).sum()),
            )
        )
    return report
