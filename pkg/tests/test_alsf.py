import math

import numpy as np
import pytest

from oracles import displacement_oracle

from nightglow.alsf import (
    AlsfParams,
    BeamSpec,
    angular_deviation,
    beam_weight,
    build_alsf,
    build_displacement_field,
    decay_term,
    polar_angle,
    preset_kernel,
    sample_family_params,
    warp_apsf,
)
from nightglow.apsf import ApsfParams, generate_apsf
from nightglow.errors import ParameterError, SizeMismatchError
from nightglow.seeding import make_rng


def small_params(beams, kappa=0.5, size=21):
    return AlsfParams(beams=beams, kappa=kappa, base=ApsfParams(T=1.4, q=0.5, size=size))


def test_polar_angle_axes():
    assert polar_angle(1.0, 0.0) == 0.0
    assert polar_angle(0.0, -1.0) == 90.0
    assert polar_angle(-1.0, 0.0) == 180.0
    assert polar_angle(0.0, 1.0) == 270.0


def test_polar_angle_range():
    rng = np.random.default_rng(0)
    for _ in range(100):
        dx, dy = rng.uniform(-5, 5, size=2)
        if dx == 0 and dy == 0:
            continue
        theta = polar_angle(dx, dy)
        assert 0.0 <= theta < 360.0


def test_angular_deviation_wraps():
    assert angular_deviation(350.0, 10.0) == 20.0
    assert angular_deviation(42.5, 42.5) == 0.0
    assert angular_deviation(90.0, 270.0) == 180.0


def test_beam_weight_values():
    beam = BeamSpec(alpha=90.0, sigma=15.0)
    assert beam_weight(0.0, beam) == 2.0
    assert beam_weight(15.0, beam) == pytest.approx(2.0 * math.exp(-1.0), abs=1e-12)
    assert beam_weight(180.0, beam) < 1e-60


def test_decay_term_values():
    assert decay_term(0.0, 1.0, 21) == 1.0
    assert decay_term(10.5, 1.0, 21) == pytest.approx(math.exp(-1.0), abs=1e-15)
    assert decay_term(123.0, 0.0, 21) == 1.0


def test_zero_beams_and_decay_give_identity_field():
    params = small_params((BeamSpec(alpha=90.0, sigma=30.0, amplitude=0.0),), kappa=0.0)
    field = build_displacement_field(params)
    assert not field.dx.any()
    assert not field.dy.any()
    assert np.all(field.det_j == 1.0)


def test_field_mirror_symmetry_at_vertical_beam():
    params = small_params((BeamSpec(alpha=90.0, sigma=25.0),), kappa=0.8, size=17)
    field = build_displacement_field(params)
    # reflecting columns about center flips dx sign, keeps dy
    assert np.abs(field.dx + field.dx[:, ::-1]).max() <= 1e-12
    assert np.abs(field.dy - field.dy[:, ::-1]).max() <= 1e-12


def test_field_matches_scalar_oracle():
    params = small_params((BeamSpec(alpha=0.0, sigma=30.0),), kappa=0.5, size=9)
    field = build_displacement_field(params)
    dx, dy = displacement_oracle(9, [(0.0, 30.0, 2.0)], 0.5)
    assert np.abs(field.dx - dx).max() <= 1e-12
    assert np.abs(field.dy - dy).max() <= 1e-12


def test_field_matches_oracle_multi_beam_sweep():
    rng = np.random.default_rng(1)
    for _ in range(20):
        size = int(rng.choice([9, 15, 21, 31]))
        n_beams = int(rng.integers(1, 4))
        beams = [
            (rng.uniform(0, 360), rng.uniform(15, 60), 2.0) for _ in range(n_beams)
        ]
        kappa = rng.uniform(0.5, 1.0)
        params = small_params(
            tuple(BeamSpec(alpha=a, sigma=s) for a, s, _ in beams), kappa, size
        )
        field = build_displacement_field(params)
        dx, dy = displacement_oracle(size, beams, kappa)
        assert np.abs(field.dx - dx).max() <= 1e-12
        assert np.abs(field.dy - dy).max() <= 1e-12


def test_identity_warp_is_bitwise():
    params = small_params((BeamSpec(alpha=45.0, sigma=30.0, amplitude=0.0),), kappa=0.0)
    apsf_kernel = generate_apsf(params.base)
    field = build_displacement_field(params)
    warped = warp_apsf(apsf_kernel, field)
    assert np.array_equal(warped, apsf_kernel)
    warped_raw = warp_apsf(apsf_kernel, field, renormalize=False)
    assert np.array_equal(warped_raw, apsf_kernel)


def test_warp_requires_matching_sizes():
    params = small_params((BeamSpec(alpha=90.0, sigma=30.0),), size=21)
    field = build_displacement_field(params)
    with pytest.raises(SizeMismatchError):
        warp_apsf(np.ones((19, 19)) / 361.0, field)


def test_warp_nonnegative_and_normalized():
    rng = make_rng(7)
    for _ in range(10):
        kernel, _ = preset_kernel("asymmetric", rng, (40, 40))
        assert (kernel >= 0.0).all()
        assert abs(kernel.sum() - 1.0) <= 1e-9


def test_mass_drift_without_renormalize():
    rng = make_rng(11)
    for _ in range(25):
        params = sample_family_params("upward", rng, (48, 48))
        apsf_kernel = generate_apsf(params.base)
        field = build_displacement_field(params)
        raw = warp_apsf(apsf_kernel, field, renormalize=False)
        assert abs(raw.sum() - 1.0) <= 0.05


def test_upward_kernel_mass_points_up():
    rng = make_rng(13)
    for _ in range(10):
        kernel, params = preset_kernel("upward", rng, (48, 48))
        c = kernel.shape[0] // 2
        assert kernel[:c, :].sum() > kernel[c + 1 :, :].sum()
        assert 75.0 <= params.beams[0].alpha <= 105.0


def test_downward_kernel_mass_points_down():
    rng = make_rng(17)
    for _ in range(10):
        kernel, params = preset_kernel("downward", rng, (48, 48))
        c = kernel.shape[0] // 2
        assert kernel[c + 1 :, :].sum() > kernel[:c, :].sum()
        assert 255.0 <= params.beams[0].alpha <= 285.0


def test_kernel_mirror_symmetric_at_alpha_90():
    params = small_params((BeamSpec(alpha=90.0, sigma=30.0),), kappa=0.7, size=31)
    kernel = build_alsf(params)
    assert np.abs(kernel - kernel[:, ::-1]).max() <= 1e-12


def test_preset_deterministic_per_seed():
    a_kernel, a_params = preset_kernel("upward", make_rng(99), (40, 60))
    b_kernel, b_params = preset_kernel("upward", make_rng(99), (40, 60))
    assert np.array_equal(a_kernel, b_kernel)
    assert a_params == b_params


def test_asymmetric_beam_count_range():
    rng = make_rng(23)
    counts = set()
    for _ in range(40):
        params = sample_family_params("asymmetric", rng, (30, 30))
        counts.add(len(params.beams))
        assert 2 <= len(params.beams) <= 4
    assert counts == {2, 3, 4}


def test_family_sampling_validates_name():
    with pytest.raises(ParameterError):
        sample_family_params("sideways", make_rng(0), (30, 30))


def test_beam_validation():
    with pytest.raises(ParameterError):
        BeamSpec(alpha=0.0, sigma=0.0)
    with pytest.raises(ParameterError):
        BeamSpec(alpha=0.0, sigma=10.0, amplitude=-1.0)
    assert BeamSpec(alpha=370.0, sigma=10.0).alpha == pytest.approx(10.0)


def test_alsf_params_validation():
    base = ApsfParams(T=1.4, q=0.5, size=9)
    with pytest.raises(ParameterError):
        AlsfParams(beams=(), kappa=0.5, base=base)
    with pytest.raises(ParameterError):
        AlsfParams(beams=(BeamSpec(0.0, 10.0),), kappa=-0.1, base=base)
