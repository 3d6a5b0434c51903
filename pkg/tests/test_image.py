import numpy as np
import pytest

from nightglow.errors import ParameterError
from nightglow.image import (
    hsv_to_rgb,
    luminance,
    normalize_kernel,
    sample_bilinear,
    to_linear,
    from_linear,
)


def test_hsv_primaries():
    assert hsv_to_rgb(0, 1, 1) == pytest.approx((1, 0, 0))
    assert hsv_to_rgb(120, 1, 1) == pytest.approx((0, 1, 0))
    assert hsv_to_rgb(240, 1, 1) == pytest.approx((0, 0, 1))


def test_hsv_zero_saturation_is_gray():
    for h in (0.0, 123.4, 359.9):
        assert hsv_to_rgb(h, 0.0, 0.7) == pytest.approx((0.7, 0.7, 0.7))


def test_hsv_wraps_hue():
    assert hsv_to_rgb(360.0, 1, 1) == pytest.approx(hsv_to_rgb(0.0, 1, 1))


def test_bilinear_at_nodes():
    rng = np.random.default_rng(0)
    k = rng.uniform(size=(5, 5))
    for i in range(5):
        for j in range(5):
            assert sample_bilinear(k, float(j), float(i)) == k[i, j]


def test_bilinear_midpoint_of_equal_weights():
    k = np.zeros((5, 5))
    k[2, 1] = k[2, 2] = 0.3
    assert sample_bilinear(k, 1.5, 2.0) == pytest.approx(0.3)


def test_bilinear_outside_domain_is_zero():
    k = np.ones((3, 3))
    assert sample_bilinear(k, -1.0, 0.0) == 0.0
    assert sample_bilinear(k, 0.0, -0.25) == 0.0
    assert sample_bilinear(k, 2.5, 1.0) == 0.0
    assert sample_bilinear(k, 2.0, 2.0) == 1.0  # far corner is inside


def test_bilinear_continuity_bound():
    rng = np.random.default_rng(1)
    k = rng.uniform(size=(9, 9))
    max_adjacent = max(
        np.abs(np.diff(k, axis=0)).max(), np.abs(np.diff(k, axis=1)).max()
    )
    eps = 1e-4
    for _ in range(300):
        u = rng.uniform(0, 8 - eps)
        v = rng.uniform(0, 8)
        delta = abs(sample_bilinear(k, u + eps, v) - sample_bilinear(k, u, v))
        assert delta <= eps * max_adjacent + 1e-12


def test_bilinear_vectorized_matches_scalar():
    rng = np.random.default_rng(2)
    k = rng.uniform(size=(7, 7))
    us = rng.uniform(-1, 7, size=20)
    vs = rng.uniform(-1, 7, size=20)
    vec = sample_bilinear(k, us, vs)
    for idx in range(20):
        assert vec[idx] == sample_bilinear(k, float(us[idx]), float(vs[idx]))


def test_luminance_weights():
    img = np.zeros((1, 1, 3))
    img[0, 0] = (1.0, 0.0, 0.0)
    assert luminance(img)[0, 0] == pytest.approx(0.299)
    img[0, 0] = (0.0, 1.0, 0.0)
    assert luminance(img)[0, 0] == pytest.approx(0.587)
    img[0, 0] = (0.0, 0.0, 1.0)
    assert luminance(img)[0, 0] == pytest.approx(0.114)


def test_normalize_kernel_unit_sum():
    rng = np.random.default_rng(3)
    k = rng.uniform(size=(11, 11))
    assert abs(normalize_kernel(k).sum() - 1.0) <= 1e-9


def test_normalize_rejects_zero_kernel():
    with pytest.raises(ParameterError):
        normalize_kernel(np.zeros((3, 3)))


def test_gamma_roundtrip():
    x = np.linspace(0, 1, 17).reshape(1, 17, 1)
    assert np.allclose(from_linear(to_linear(x)), x, atol=1e-12)
