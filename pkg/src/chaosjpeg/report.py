"""Evaluation report: delimited metrics plus figures.

``write_report`` encrypts each input image with one key and writes

    metrics.csv            image,metric,value rows
    metrics.txt            the same values as key=value lines
    <image>_attacks.png    plain vs ciphertext sketch-attack maps (luma)
    <image>_views.png      original, rendered ciphertext, decrypted
    alpha_vs_clamp.png     coefficients lost by the two overflow treatments

Run it as ``python -m chaosjpeg.report --out DIR [--seed S] IMAGE...`` with
PPM/PGM or baseline JPEG inputs.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .analysis import ATTACK_KINDS, channel_entropy, leak_score, psnr, run_attack
from .chaos import EncryptionKey, generate_key
from .cipher import (
    CiphertextImage,
    alpha_scale_blocks,
    clamp_spatial,
    decrypt_image,
    encrypt_coefficients,
    overflow_blocks,
    repair_overflow,
)
from .jpeg import (
    DEFAULT_QF,
    CoefficientImage,
    clamp_samples,
    component_samples,
    compress,
    decode_jpeg,
    render,
)
from .jpeg.image import plane_from_samples
from .netpbm import decode_netpbm
from .osn import platform_process, survival_report


@dataclass
class OverflowComparison:
    """AC coefficients lost by alpha scaling vs. pixel-clamp repair.

    Counts cover all components of one encrypted image. ``*_zeroed`` counts
    nonzero AC coefficients that became 0; ``*_changed`` counts every AC
    coefficient whose value changed. ``clamp_*`` clamps each component plane
    in place, the same domain alpha scaling works in. ``repair_*`` is the
    pipeline's RGB-path repair, which also carries color round-trip noise.
    """

    alpha: float
    overflow_blocks: int
    alpha_zeroed: int
    alpha_changed: int
    clamp_zeroed: int
    clamp_changed: int
    repair_zeroed: int
    repair_changed: int


def _ac_losses(before: CoefficientImage, after: CoefficientImage):
    zeroed = changed = 0
    for pa, pb in zip(before.planes, after.planes):
        a = pa.flat()[:, 1:]
        b = pb.flat()[:, 1:]
        zeroed += int(((a != 0) & (b == 0)).sum())
        changed += int((a != b).sum())
    return zeroed, changed


def clamp_components(image: CoefficientImage) -> CoefficientImage:
    """Clamp every component plane to [0, 255] and requantize it with its own table."""
    out = image.copy()
    for i, (plane, samples, q) in enumerate(zip(image.planes, component_samples(image), image.qtables)):
        out.planes[i] = plane_from_samples(plane.component, clamp_spatial(samples), q)
    return out


def compare_overflow_treatments(encrypted: CoefficientImage, alpha=0.4, qf=DEFAULT_QF) -> OverflowComparison:
    """Apply both overflow treatments to an encrypted coefficient image."""
    scaled = encrypted.copy()
    n_overflow = 0
    for i, (plane, q) in enumerate(zip(encrypted.planes, encrypted.qtables)):
        blocks = overflow_blocks(plane, q)
        n_overflow += len(blocks)
        scaled.planes[i] = alpha_scale_blocks(plane, alpha, blocks)
    a_zero, a_chg = _ac_losses(encrypted, scaled)
    c_zero, c_chg = _ac_losses(encrypted, clamp_components(encrypted))
    r_zero, r_chg = _ac_losses(encrypted, repair_overflow(encrypted, qf))
    return OverflowComparison(alpha, n_overflow, a_zero, a_chg, c_zero, c_chg, r_zero, r_chg)


@dataclass
class ImageEvaluation:
    name: str
    metrics: dict
    original: np.ndarray
    cipher_view: np.ndarray
    decrypted: np.ndarray
    plain_maps: dict
    cipher_maps: dict
    overflow: OverflowComparison


def _fmt(value):
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.6f}"
    return str(value)


def evaluate_image(name, img, key: EncryptionKey, qf=DEFAULT_QF) -> ImageEvaluation:
    img = np.asarray(img, dtype=np.uint8)
    plain = compress(img, qf)
    encrypted = encrypt_coefficients(plain, key)
    ct = CiphertextImage.from_coefficients(repair_overflow(encrypted, qf), qf)
    cipher_coefs = decode_jpeg(ct.data)
    view = render(cipher_coefs)
    decrypted = decrypt_image(ct, key)
    uploaded = platform_process(ct)

    m = {}
    channels = ("y", "cb", "cr")
    # entropy of the decoded component planes, chroma at its stored resolution
    for ch, samples in zip(channels, component_samples(cipher_coefs)):
        m[f"cipher_entropy_{ch}"] = channel_entropy(clamp_samples(samples))
    m["psnr_cipher_rgb"] = psnr(img, view)
    m["psnr_cipher_ycbcr"] = psnr(img, view, space="ycbcr")
    m["psnr_decrypted"] = psnr(img, decrypted)
    m["psnr_decrypted_after_upload"] = psnr(img, decrypt_image(uploaded, key))
    m["upload_fraction_identical"] = survival_report(ct, uploaded).fraction_identical

    plain_maps, cipher_maps = {}, {}
    for kind in ATTACK_KINDS:
        plain_maps[kind] = run_attack(kind, plain.planes[0])
        cipher_maps[kind] = run_attack(kind, cipher_coefs.planes[0])
        m[f"leak_{kind}"] = leak_score(plain_maps[kind], cipher_maps[kind])

    overflow = compare_overflow_treatments(encrypted, qf=qf)
    for field, value in asdict(overflow).items():
        m[f"overflow_{field}"] = value
    return ImageEvaluation(name, m, img, view, decrypted, plain_maps, cipher_maps, overflow)


def write_metrics(evaluations, out_dir):
    out_dir = Path(out_dir)
    rows = [(ev.name, k, _fmt(v)) for ev in evaluations for k, v in ev.metrics.items()]
    with open(out_dir / "metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("image", "metric", "value"))
        writer.writerows(rows)
    with open(out_dir / "metrics.txt", "w") as fh:
        for name, k, v in rows:
            fh.write(f"{name}.{k}={v}\n")
    return out_dir / "metrics.csv", out_dir / "metrics.txt"


def _figure_modules():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_attacks(ev: ImageEvaluation, path):
    plt = _figure_modules()
    fig, axes = plt.subplots(2, len(ATTACK_KINDS), figsize=(3 * len(ATTACK_KINDS), 6.2))
    for col, kind in enumerate(ATTACK_KINDS):
        for row, (label, maps) in enumerate((("plain", ev.plain_maps), ("cipher", ev.cipher_maps))):
            ax = axes[row, col]
            ax.imshow(maps[kind].intensities, cmap="gray", vmin=0, vmax=255, interpolation="nearest")
            title = f"{kind.upper()} {label}"
            if row == 1:
                title += f" (leak {ev.metrics[f'leak_{kind}']:+.3f})"
            ax.set_title(title, fontsize=9)
            ax.axis("off")
    fig.suptitle(f"{ev.name}: luma sketch attacks")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_views(ev: ImageEvaluation, path):
    plt = _figure_modules()
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.6))
    titles = (
        "original",
        f"ciphertext ({ev.metrics['psnr_cipher_ycbcr']:.2f} dB)",
        f"decrypted ({ev.metrics['psnr_decrypted']:.2f} dB)",
    )
    for ax, img, title in zip(axes, (ev.original, ev.cipher_view, ev.decrypted), titles):
        ax.imshow(img, cmap="gray" if img.ndim == 2 else None, vmin=0, vmax=255)
        ax.set_title(title, fontsize=9)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def plot_overflow(evaluations, path):
    plt = _figure_modules()
    names = [ev.name for ev in evaluations]
    x = np.arange(len(names))
    series = (
        ("alpha zeroed", [ev.overflow.alpha_zeroed for ev in evaluations]),
        ("clamp zeroed", [ev.overflow.clamp_zeroed for ev in evaluations]),
        ("clamp changed", [ev.overflow.clamp_changed for ev in evaluations]),
        ("RGB repair changed", [ev.overflow.repair_changed for ev in evaluations]),
    )
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(1.5 + 2 * len(names), 3.5))
    for i, (label, values) in enumerate(series):
        ax.bar(x + (i - (len(series) - 1) / 2) * width, values, width, label=label)
    ax.set_xticks(x, names)
    ax.set_ylabel("AC coefficients")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def write_report(images, key: EncryptionKey, out_dir, qf=DEFAULT_QF):
    """Evaluate ``images`` (name -> pixels) and write metrics and figures.

    Returns the evaluations and the list of files written.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluations = [evaluate_image(name, img, key, qf) for name, img in images.items()]
    written = list(write_metrics(evaluations, out_dir))
    for ev in evaluations:
        for suffix, plot in (("attacks", plot_attacks), ("views", plot_views)):
            path = out_dir / f"{ev.name}_{suffix}.png"
            plot(ev, path)
            written.append(path)
    path = out_dir / "alpha_vs_clamp.png"
    plot_overflow(evaluations, path)
    written.append(path)
    return evaluations, written


def load_image(path):
    data = Path(path).read_bytes()
    if data[:2] == b"\xff\xd8":
        return render(decode_jpeg(data))
    return decode_netpbm(data)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="python -m chaosjpeg.report")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=1, help="key seed")
    parser.add_argument("images", nargs="+")
    args = parser.parse_args(argv)
    images = {Path(p).stem: load_image(p) for p in args.images}
    _, written = write_report(images, generate_key(args.seed), args.out)
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
