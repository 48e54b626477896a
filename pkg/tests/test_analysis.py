import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from planes import random_plane

from chaosjpeg.analysis import (
    ATTACK_KINDS,
    AttackMap,
    attack_dcm,
    attack_eac,
    attack_ncc,
    attack_plz,
    channel_entropy,
    leak_score,
    psnr,
    run_attack,
)
from chaosjpeg.chaos import generate_key
from chaosjpeg.cipher import encrypt_ac, encrypt_dc_blocks, plan_permutations
from chaosjpeg.errors import DimensionMismatch, GridMismatch
from chaosjpeg.jpeg import CoefficientPlane


def _plane(coefs):
    coefs = np.asarray(coefs, dtype=np.int32)
    return CoefficientPlane("Y", coefs, coefs.shape[1] * 8, coefs.shape[0] * 8)


# -- entropy and PSNR ------------------------------------------------------------

def test_entropy_extremes():
    assert channel_entropy(np.full((10, 10), 7, np.uint8)) == 0.0
    assert channel_entropy(np.arange(256, dtype=np.uint8).repeat(3)) == pytest.approx(8.0)
    assert channel_entropy(np.array([0, 255] * 50, dtype=np.uint8)) == pytest.approx(1.0)


def test_entropy_empty_channel():
    with pytest.raises(ValueError):
        channel_entropy(np.zeros(0, np.uint8))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_entropy_is_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 256, 500).astype(np.uint8)
    h = channel_entropy(x)
    assert 0 <= h <= 8
    assert channel_entropy(rng.permutation(x)) == pytest.approx(h, abs=1e-12)


def test_psnr_examples():
    a = np.zeros((4, 4, 3), np.uint8)
    assert math.isinf(psnr(a, a))
    assert psnr(a, np.full_like(a, 255)) == pytest.approx(0.0)
    b = a.copy()
    b[0, 0, 0] = 16
    # MSE = 256 / 48
    assert psnr(a, b) == pytest.approx(10 * math.log10(255**2 * 48 / 256))


def test_psnr_symmetric_and_checked():
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, 256, (2, 8, 8, 3), dtype=np.uint8)
    assert psnr(a, b) == psnr(b, a)
    assert psnr(a, b, space="ycbcr") == psnr(b, a, space="ycbcr")
    with pytest.raises(DimensionMismatch):
        psnr(a, b[:4])
    with pytest.raises(DimensionMismatch):
        psnr(a[..., 0], b[..., 0], space="ycbcr")
    with pytest.raises(ValueError):
        psnr(a, b, space="lab")


def test_psnr_ycbcr_of_gray_offset():
    # a pure luma offset shows up only in Y, so the 3-component MSE is a third
    a = np.full((4, 4, 3), 100, np.uint8)
    b = np.full((4, 4, 3), 110, np.uint8)
    assert psnr(a, b, space="ycbcr") == pytest.approx(10 * math.log10(255**2 / (100 / 3)), abs=1e-6)


# -- attack maps -----------------------------------------------------------------

def test_dcm_examples():
    assert not attack_dcm(_plane(np.zeros((2, 3, 64)))).intensities.any()
    coefs = np.zeros((1, 3, 64))
    coefs[0, :, 0] = [1016, -1, -1024]
    m = attack_dcm(_plane(coefs))
    assert m.features.tolist() == [[10, 1, 11]]
    assert m.intensities.tolist() == [[232, 23, 255]]


def test_ncc_examples():
    coefs = np.zeros((1, 2, 64))
    coefs[0, 0, 1:] = 3
    coefs[0, 1, 0] = 50  # DC does not count
    m = attack_ncc(_plane(coefs))
    assert m.features.tolist() == [[63, 0]]
    assert m.intensities.tolist() == [[255, 0]]


def test_eac_examples():
    assert not attack_eac(_plane(np.zeros((2, 2, 64)))).intensities.any()
    a = np.zeros((1, 2, 64))
    a[0, 0, 5] = 7
    a[0, 1, 5] = -7
    m = attack_eac(_plane(a))
    assert m.features.tolist() == [[49, 49]]
    assert m.intensities.tolist() == [[255, 255]]
    a[0, 1, 5] = 1
    m = attack_eac(_plane(a))
    assert m.intensities[0, 1] == round(255 * math.log(2) / math.log(50))


def test_plz_examples():
    coefs = np.zeros((1, 4, 64))
    coefs[0, 1, 63] = 1
    coefs[0, 2, 0] = 9
    coefs[0, 3, [3, 10]] = [1, -2]
    m = attack_plz(_plane(coefs))
    assert m.features.tolist() == [[0, 63, 0, 10]]
    assert m.intensities.tolist() == [[0, 255, 0, round(10 * 255 / 63)]]


def test_run_attack_dispatch_and_upscale():
    plane = random_plane(np.random.default_rng(0), 3, 2)
    for kind in ATTACK_KINDS:
        m = run_attack(kind, plane)
        assert m.kind == kind and m.shape == (2, 3)
        assert m.intensities.dtype == np.uint8
        up = m.upscaled()
        assert up.shape == (16, 24)
        assert (up[8:16, 16:24] == m.intensities[1, 2]).all()
    with pytest.raises(ValueError):
        run_attack("xyz", plane)


def test_leak_score_examples():
    m = attack_eac(random_plane(np.random.default_rng(1), 8, 8))
    assert leak_score(m, m) == pytest.approx(1.0)
    neg = AttackMap("eac", -m.features, 255 - m.intensities)
    assert leak_score(m, neg) == pytest.approx(-1.0)
    flat = AttackMap("eac", m.features, np.zeros_like(m.intensities))
    assert leak_score(m, flat) == 0.0
    with pytest.raises(GridMismatch):
        leak_score(m, AttackMap("eac", m.features[:4], m.intensities[:4]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 12))
def test_block_permutation_preserves_map_histograms(seed, bw, bh):
    plane = random_plane(np.random.default_rng(seed), bw, bh)
    enc = encrypt_dc_blocks(plane, plan_permutations(generate_key(seed % 50), bw, bh))
    for kind in ATTACK_KINDS:
        a = np.sort(run_attack(kind, plane).intensities.ravel())
        b = np.sort(run_attack(kind, enc).intensities.ravel())
        np.testing.assert_array_equal(a, b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12), st.integers(1, 12))
def test_ac_xor_alone_leaves_plz_untouched(seed, bw, bh):
    plane = random_plane(np.random.default_rng(seed), bw, bh)
    enc = encrypt_ac(plane, generate_key(seed % 50).henon_stream().ecus(bw * bh))
    np.testing.assert_array_equal(attack_plz(enc).intensities, attack_plz(plane).intensities)
    np.testing.assert_array_equal(attack_ncc(enc).intensities, attack_ncc(plane).intensities)
