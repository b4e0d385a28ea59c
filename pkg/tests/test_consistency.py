import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from skimage.metrics import structural_similarity

from oracles import ssim_windowed
from wowbench.consistency import (
    ConsistencyMode,
    FramePair,
    Region,
    RegionEmbeddingSequence,
    consistency_metrics,
    psnr,
    regional_consistency,
    ssim,
    video_frame_metrics,
)
from wowbench.normalization import prescale
from wowbench.registry import default_registry


def seq(frames, region=Region.ARM):
    return RegionEmbeddingSequence(region, np.asarray(frames, dtype=float))


def cos(u, v):
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def test_constant_sequence_is_one():
    s = seq([[1.0, 2.0, 3.0]] * 4)
    assert regional_consistency(s) == pytest.approx(1.0, abs=1e-15)
    assert regional_consistency(s, ConsistencyMode.ANCHOR_FIRST) == pytest.approx(1.0, abs=1e-15)


def test_orthogonal_pair_is_zero():
    assert regional_consistency(seq([[1, 0], [0, 1]])) == 0.0


def test_definitional_oracle():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(3, 6))
    s = seq(v)
    assert regional_consistency(s) == pytest.approx((cos(v[0], v[1]) + cos(v[1], v[2])) / 2, abs=1e-14)
    assert regional_consistency(s, "anchor_first") == pytest.approx((cos(v[0], v[1]) + cos(v[0], v[2])) / 2, abs=1e-14)


def test_sequence_validation():
    with pytest.raises(ValueError):
        seq([[1, 2]])
    with pytest.raises(ValueError):
        seq([[1, 2], [0, 0]])
    with pytest.raises(ValueError):
        RegionEmbeddingSequence("elbow", np.ones((2, 2)))


@given(st.integers(0, 1000))
def test_scale_invariance(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(5, 4)) + 0.1
    scales = rng.uniform(0.01, 100, size=(5, 1))
    for mode in ConsistencyMode:
        assert regional_consistency(seq(v * scales), mode) == pytest.approx(regional_consistency(seq(v), mode), abs=1e-12)


def test_static_video_all_regions_one():
    v = [[0.3, -1.2, 4.0]] * 6
    out = consistency_metrics([seq(v, r) for r in Region])
    for k, val in out.items():
        assert val == pytest.approx(1.0, abs=1e-15), k
    assert set(out) >= {"consistency_arm", "consistency_object", "consistency_background", "consistency_mean"}


def frames(value, shape=(16, 16, 3)):
    return np.full(shape, value, dtype=np.uint8)


def test_psnr_examples():
    assert psnr(FramePair(frames(7), frames(7))) == math.inf
    assert prescale(math.inf, default_registry().metric("psnr")) == 1.0
    # 10 log10(65025 / 256), evaluated directly
    assert psnr(FramePair(frames(0), frames(16))) == pytest.approx(24.04840395556061, abs=1e-12)
    assert psnr(FramePair(frames(0), frames(255))) == 0.0
    with pytest.raises(ValueError):
        FramePair(frames(0), frames(0, (8, 8, 3)))


@given(st.integers(0, 10_000))
def test_psnr_symmetric_and_decreasing(seed):
    rng = np.random.default_rng(seed)
    ref = rng.integers(0, 200, size=(12, 12), dtype=np.uint8)
    noise = rng.integers(1, 8, size=ref.shape).astype(np.uint8)
    mask = np.zeros(ref.size, dtype=bool)
    prev = math.inf
    for k in (10, 40, 144):  # nested perturbation sets
        mask[:k] = True
        test = ref + (noise * mask.reshape(ref.shape)).astype(np.uint8)
        p = psnr(FramePair(ref, test))
        assert p == psnr(FramePair(test, ref))
        assert p < prev
        prev = p


def test_ssim_identical_is_one():
    rng = np.random.default_rng(0)
    f = rng.integers(0, 256, size=(20, 24, 3), dtype=np.uint8)
    assert ssim(FramePair(f, f)) == pytest.approx(1.0, abs=1e-12)


def test_ssim_constant_closed_form():
    c1 = (0.01 * 255) ** 2
    expected = (2 * 100 * 101 + c1) / (100**2 + 101**2 + c1)
    got = ssim(FramePair(frames(100, (12, 12)), frames(101, (12, 12))))
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(0.9999505134293563, abs=1e-12)


def test_ssim_negative_of_textured_frame():
    rng = np.random.default_rng(1)
    f = rng.integers(0, 256, size=(14, 13), dtype=np.uint8)
    neg = 255 - f
    got = ssim(FramePair(f, neg))
    assert -1 <= got < 0
    assert got == pytest.approx(ssim_windowed(f, neg), abs=1e-10)


def test_ssim_negative_of_constant_frame_stays_positive():
    # luminance term only: structure is undefined for flat images
    got = ssim(FramePair(frames(40, (12, 12)), frames(215, (12, 12))))
    assert got == pytest.approx(ssim_windowed(np.full((12, 12), 40.0), np.full((12, 12), 215.0)), abs=1e-12)
    assert got > 0


def test_ssim_matches_window_oracle_and_skimage():
    rng = np.random.default_rng(2)
    for _ in range(5):
        a = rng.integers(0, 256, size=(15, 17), dtype=np.uint8)
        b = np.clip(a + rng.normal(0, 25, a.shape), 0, 255).astype(np.uint8)
        got = ssim(FramePair(a, b))
        assert got == pytest.approx(ssim_windowed(a, b), abs=1e-10)
        ref = structural_similarity(
            a, b, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255
        )
        assert got == pytest.approx(ref, abs=1e-8)
        assert got == pytest.approx(ssim(FramePair(b, a)), abs=1e-14)


def test_ssim_channels_averaged():
    rng = np.random.default_rng(4)
    a = rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8)
    b = rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8)
    per = [ssim(FramePair(a[..., c], b[..., c])) for c in range(3)]
    assert ssim(FramePair(a, b)) == pytest.approx(np.mean(per), abs=1e-14)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim(FramePair(frames(1, (10, 30)), frames(1, (10, 30))))


def test_video_frame_metrics_pool_mse():
    ref = np.zeros((2, 12, 12, 3), dtype=np.uint8)
    test = ref.copy()
    test[1] = 16
    out = video_frame_metrics(ref, test)
    assert out["psnr"] == pytest.approx(10 * math.log10(255**2 / 128), abs=1e-12)
    assert video_frame_metrics(ref, ref)["psnr"] == math.inf
