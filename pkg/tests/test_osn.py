import io

import numpy as np
import pytest
from PIL import Image

from chaosjpeg.chaos import generate_key
from chaosjpeg.cipher import CiphertextImage, encrypt_image
from chaosjpeg.errors import DimensionMismatch, MalformedBitstream, Unsupported
from chaosjpeg.jpeg import compress, decode_jpeg, encode_jpeg
from chaosjpeg.osn import PlatformPolicy, platform_process, survival_report


def _jpeg(img, qf=71):
    return CiphertextImage.from_coefficients(compress(img, qf), qf)


def test_policy_validation():
    assert PlatformPolicy().recompress_qf == 71
    with pytest.raises(ValueError):
        PlatformPolicy(recompress_qf=0)
    with pytest.raises(ValueError):
        PlatformPolicy(sampling="4:2:0")


def test_gray_image_recompression_is_identity():
    up = _jpeg(np.full((64, 64, 3), 128, np.uint8))
    out = platform_process(up)
    a, b = decode_jpeg(up.data), decode_jpeg(out.data)
    for pa, pb in zip(a.planes, b.planes):
        np.testing.assert_array_equal(pa.coefs, pb.coefs)
    report = survival_report(up, out)
    assert report.fraction_identical == 1.0


def test_oversized_upload_rejected():
    buf = io.BytesIO()
    Image.new("L", (2048, 16)).save(buf, "JPEG")
    with pytest.raises(Unsupported):
        platform_process(buf.getvalue())
    buf = io.BytesIO()
    Image.new("RGB", (2047, 8)).save(buf, "JPEG")
    out = platform_process(buf.getvalue())
    assert (out.width, out.height) == (2047, 8)


def test_malformed_upload():
    with pytest.raises(MalformedBitstream):
        platform_process(b"\xff\xd8\xff")


def test_output_is_fresh_standard_jpeg():
    rng = np.random.default_rng(0)
    ct = encrypt_image(rng.integers(0, 256, (40, 48, 3), dtype=np.uint8), generate_key(2))
    out = platform_process(ct, PlatformPolicy(recompress_qf=50))
    assert out.quality == 50 and out.sampling == ((2, 1), (1, 1), (1, 1))
    with Image.open(io.BytesIO(out.data)) as im:
        im.load()
    decode_jpeg(out.data)


def test_recompression_idempotent_on_clamp_free_image():
    yy, xx = np.mgrid[0:32, 0:48]
    img = np.stack([80 + xx, 100 + yy, 120 + (xx + yy) // 2], -1).astype(np.uint8)
    once = platform_process(_jpeg(img))
    twice = platform_process(once)
    for pa, pb in zip(decode_jpeg(once.data).planes, decode_jpeg(twice.data).planes):
        np.testing.assert_array_equal(pa.coefs, pb.coefs)


def test_survival_accounting():
    rng = np.random.default_rng(3)
    a = _jpeg(rng.integers(0, 256, (24, 32, 3), dtype=np.uint8))
    ci = decode_jpeg(a.data)
    ci.planes[0].coefs[0, 0, 5] += 1
    ci.planes[0].coefs[0, 1, :] = 0
    b = CiphertextImage.from_coefficients(ci)
    report = survival_report(a, b)
    y = report.components[0]
    assert y.total == ci.planes[0].coefs.size
    assert 0 <= y.fraction_identical <= 1
    assert y.changed == y.total - y.identical
    assert y.changed >= y.zero_flips and y.changed >= y.category_changes
    assert report.components[1].fraction_identical == 1.0
    assert survival_report(a, a).fraction_identical == 1.0


def test_survival_report_formats():
    a = _jpeg(np.zeros((16, 16, 3), np.uint8))
    text = survival_report(a, a).format()
    assert "overall: 100.00% identical" in text
    pairs = dict(line.split("=") for line in text.splitlines() if "=" in line)
    assert pairs["y.fraction_identical"] == "1.000000"
    assert pairs["overall.fraction_identical"] == "1.000000"


def test_survival_dimension_mismatch():
    a = _jpeg(np.zeros((16, 16, 3), np.uint8))
    b = _jpeg(np.zeros((16, 24, 3), np.uint8))
    with pytest.raises(DimensionMismatch):
        survival_report(a, b)
    with pytest.raises(DimensionMismatch):
        survival_report(a, encode_jpeg(compress(np.zeros((16, 16), np.uint8))))
