import csv

import numpy as np
import pytest

from chaosjpeg.chaos import generate_key
from chaosjpeg.cipher import encrypt_coefficients
from chaosjpeg.jpeg import compress
from chaosjpeg.netpbm import write_netpbm
from chaosjpeg.report import compare_overflow_treatments, main, write_report


def _image(seed=0, h=48, w=64):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w]
    base = np.stack([2 * xx + yy, 3 * yy, 255 - 2 * xx], -1) + rng.integers(-20, 21, (h, w, 3))
    return np.clip(base, 0, 255).astype(np.uint8)


def test_write_report_outputs(tmp_path):
    evs, written = write_report({"tiny": _image()}, generate_key(1), tmp_path)
    names = sorted(p.name for p in written)
    assert names == sorted(["metrics.csv", "metrics.txt", "tiny_attacks.png", "tiny_views.png", "alpha_vs_clamp.png"])
    for p in written:
        assert p.stat().st_size > 0
    for p in written:
        if p.suffix == ".png":
            assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    with open(tmp_path / "metrics.csv") as fh:
        rows = list(csv.DictReader(fh))
    metrics = {r["metric"]: r["value"] for r in rows}
    for key in ("cipher_entropy_y", "psnr_cipher_ycbcr", "psnr_decrypted", "leak_plz", "overflow_alpha_zeroed"):
        assert key in metrics
    assert float(metrics["psnr_decrypted"]) >= 25
    lines = (tmp_path / "metrics.txt").read_text().splitlines()
    assert len(lines) == len(rows)
    assert all(ln.startswith("tiny.") for ln in lines)
    assert evs[0].metrics["psnr_decrypted"] == pytest.approx(float(metrics["psnr_decrypted"]), abs=1e-6)


def test_overflow_comparison_invariants():
    enc = encrypt_coefficients(compress(_image(3), 71), generate_key(2))
    c = compare_overflow_treatments(enc)
    assert c.alpha == 0.4
    assert 0 <= c.alpha_zeroed <= c.alpha_changed
    assert 0 <= c.clamp_zeroed <= c.clamp_changed
    assert 0 <= c.repair_zeroed <= c.repair_changed
    if c.overflow_blocks == 0:
        assert c.alpha_changed == 0 and c.clamp_changed == 0


def test_overflow_comparison_on_in_range_image():
    # unencrypted coefficients of a smooth image decode in range: nothing to repair
    yy, xx = np.mgrid[0:32, 0:32]
    img = np.stack([80 + xx, 90 + yy, 100 + xx], -1).astype(np.uint8)
    c = compare_overflow_treatments(compress(img, 71))
    assert c.overflow_blocks == 0
    assert c.alpha_changed == 0 and c.clamp_changed == 0


def test_main(tmp_path, capsys):
    write_netpbm(tmp_path / "pic.ppm", _image(5, 24, 32))
    assert main(["--out", str(tmp_path / "out"), "--seed", "3", str(tmp_path / "pic.ppm")]) == 0
    printed = capsys.readouterr().out.split()
    assert any(p.endswith("pic_views.png") for p in printed)
    assert (tmp_path / "out" / "metrics.csv").exists()
