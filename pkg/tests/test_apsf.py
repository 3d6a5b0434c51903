import numpy as np
import pytest

from nightglow.apsf import ApsfParams, apsf_radial_profile, generate_apsf, kernel_size
from nightglow.errors import ParameterError


def sample_supp_params(rng, size=None):
    return ApsfParams(
        T=rng.uniform(1.1, 1.8),
        q=rng.uniform(0.2, 0.7),
        size=size or int(rng.choice([31, 45, 63, 77])),
    )


def test_param_validation():
    with pytest.raises(ParameterError):
        ApsfParams(T=0.0, q=0.5, size=31)
    with pytest.raises(ParameterError):
        ApsfParams(T=1.4, q=1.0, size=31)
    with pytest.raises(ParameterError):
        ApsfParams(T=1.4, q=0.5, size=30)
    with pytest.raises(ParameterError):
        ApsfParams(T=1.4, q=0.5, size=1)


def test_kernel_size_forced_odd():
    assert kernel_size(1.0, 100, 100) == 101
    assert kernel_size(0.75, 100, 80) == 75
    assert kernel_size(1.5, 10, 512) == 769
    assert kernel_size(0.01, 8, 8) == 3  # floor of tiny sizes


def test_profile_peaks_at_center():
    rng = np.random.default_rng(0)
    for _ in range(20):
        params = sample_supp_params(rng)
        _, intensity = apsf_radial_profile(params, 128)
        assert intensity[0] == intensity.max()


def test_profile_nonnegative_sweep():
    rng = np.random.default_rng(1)
    for _ in range(100):
        params = sample_supp_params(rng)
        _, intensity = apsf_radial_profile(params, 128)
        assert (intensity >= 0.0).all()


def test_profile_monotone_decreasing():
    rng = np.random.default_rng(2)
    for _ in range(50):
        params = sample_supp_params(rng)
        _, intensity = apsf_radial_profile(params, 64)
        assert (np.diff(intensity) <= 1e-12).all()


def test_half_mass_radius_grows_with_thickness():
    for q in (0.2, 0.45, 0.7):
        radii = []
        for t in (1.1, 1.45, 1.8):
            rho, intensity = apsf_radial_profile(ApsfParams(T=t, q=q, size=63), 1024)
            annular = intensity * rho  # ring mass of the radial distribution
            cum = np.cumsum(annular)
            radii.append(rho[np.searchsorted(cum, 0.5 * cum[-1])])
        assert radii[0] <= radii[1] <= radii[2]


def test_profile_needs_two_samples():
    with pytest.raises(ParameterError):
        apsf_radial_profile(ApsfParams(T=1.4, q=0.5, size=31), 1)


def test_kernel_dihedral_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(5):
        k = generate_apsf(sample_supp_params(rng, size=31))
        assert np.abs(k - k.T).max() <= 1e-12
        assert np.abs(k - k[::-1, :]).max() <= 1e-12
        assert np.abs(k - k[:, ::-1]).max() <= 1e-12
        assert np.abs(k - k[::-1, ::-1]).max() <= 1e-12


def test_kernel_unit_sum():
    rng = np.random.default_rng(4)
    for _ in range(20):
        k = generate_apsf(sample_supp_params(rng))
        assert abs(k.sum() - 1.0) <= 1e-9


def test_kernel_center_is_argmax():
    rng = np.random.default_rng(5)
    for _ in range(10):
        k = generate_apsf(sample_supp_params(rng))
        c = k.shape[0] // 2
        assert k[c, c] == k.max()


def test_kernel_radially_monotone():
    rng = np.random.default_rng(6)
    for _ in range(10):
        params = sample_supp_params(rng, size=45)
        k = generate_apsf(params)
        c = k.shape[0] // 2
        radii = np.linspace(0.0, c, 64)
        values = [k[c, c + int(round(r))] for r in radii]
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
