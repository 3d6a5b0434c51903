"""Anisotropic light spread kernels built by warping an isotropic one.

Directional street lighting, shades and occlusions stretch the glow of
a source into comet-like tails. The stretch is modeled as a radial
displacement field over the kernel grid. For a pixel at offset
(dx, dy) from the kernel center (image rows grow downward):

    theta  = atan2(-dy, dx) in degrees, normalized to [0, 360)
    delta_i = min(|theta - alpha_i|, 360 - |theta - alpha_i|)
    G_i    = A_i * exp(-delta_i^2 / sigma_i^2)      per beam
    Phi    = sum_i G_i
    D      = exp(-kappa * r / (s/2))
    S      = (1 + Phi) * D
    r'     = r / S
    dr     = r' - r
    (Dx, Dy) = (dr * cos(theta), -dr * sin(theta))

The warped kernel samples the source kernel at (u + Dx, v + Dy) with
bilinear interpolation (out of bounds reads zero) and divides by a
Jacobian compensation term so stretching does not blow up total energy.

Compensation strength: dividing by the full inverse determinant of the
sampling map restores energy exactly, but an exactly compensated radial
warp moves no net mass between the kernel halves, which erases the tail
weight the beams are meant to create. The divisor is therefore the
inverse determinant raised to COMPENSATION_EXPONENT < 1: the stretched
tail keeps a few percent of extra weight while residual energy drift
stays well under five percent before renormalization (and renormalizing
is the default).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .apsf import ApsfParams, generate_apsf, kernel_size
from .errors import ParameterError, SizeMismatchError
from .image import normalize_kernel, sample_bilinear

BEAM_INTENSITY = 2.0
COMPENSATION_EXPONENT = 0.9
DET_FLOOR = 1e-6

FAMILIES = ("upward", "downward", "asymmetric")

# Kernel-type indices used for per-component assignment.
FAMILY_INDEX = {"upward": 0, "downward": 1, "asymmetric": 2}


@dataclass(frozen=True)
class BeamSpec:
    """One shaped light beam: direction, angular spread, intensity."""

    alpha: float
    sigma: float
    amplitude: float = BEAM_INTENSITY

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ParameterError("sigma", f"spread angle must be > 0, got {self.sigma}")
        if self.amplitude < 0.0:
            raise ParameterError("amplitude", f"intensity must be >= 0, got {self.amplitude}")
        object.__setattr__(self, "alpha", float(self.alpha) % 360.0)


@dataclass(frozen=True)
class AlsfParams:
    """Full anisotropic kernel recipe: beams, decay, base kernel."""

    beams: tuple[BeamSpec, ...]
    kappa: float
    base: ApsfParams

    def __post_init__(self):
        if len(self.beams) == 0:
            raise ParameterError("beams", "need at least one beam")
        if self.kappa < 0.0:
            raise ParameterError("kappa", f"decay factor must be >= 0, got {self.kappa}")
        object.__setattr__(self, "beams", tuple(self.beams))


@dataclass(frozen=True)
class DisplacementField:
    """Per-pixel sampling offsets and the energy-compensation divisor."""

    size: int
    dx: np.ndarray
    dy: np.ndarray
    det_j: np.ndarray


def polar_angle(dx, dy):
    """Angle of an offset in degrees, [0, 360), with image-up at 90."""
    return np.degrees(np.arctan2(-np.asarray(dy, dtype=np.float64), dx)) % 360.0


def angular_deviation(theta, alpha):
    """Shortest angular distance between two directions, in [0, 180]."""
    d = np.abs(np.asarray(theta, dtype=np.float64) - alpha)
    return np.minimum(d, 360.0 - d)


def beam_weight(delta, beam: BeamSpec):
    """Gaussian angular falloff of one beam at deviation delta degrees."""
    d = np.asarray(delta, dtype=np.float64)
    return beam.amplitude * np.exp(-(d * d) / (beam.sigma * beam.sigma))


def decay_term(r, kappa: float, w: int):
    """Radial attenuation exp(-kappa * r / (w/2)) of the warp strength."""
    return np.exp(-kappa * np.asarray(r, dtype=np.float64) / (w / 2.0))


def build_displacement_field(
    params: AlsfParams,
    size: int | None = None,
    compensation: float = COMPENSATION_EXPONENT,
) -> DisplacementField:
    """Evaluate the displacement field and its compensation divisor.

    The divisor is derived from the determinant of the sampling map
    (central finite differences, one-sided at the grid borders), floored
    at DET_FLOOR to guard fold-over, and raised to -compensation.
    """
    s = params.base.size if size is None else size
    if s % 2 == 0:
        raise ParameterError("size", f"field size must be odd, got {s}")
    center = s // 2
    offsets = np.arange(s, dtype=np.float64) - center
    dx = offsets[None, :]
    dy = offsets[:, None]
    r = np.sqrt(dx * dx + dy * dy)
    theta = polar_angle(dx, dy)

    phi = np.zeros_like(r)
    for beam in params.beams:
        phi += beam_weight(angular_deviation(theta, beam.alpha), beam)
    scale = (1.0 + phi) * decay_term(r, params.kappa, s)
    if (scale <= 0.0).any():
        raise ParameterError("beams", "composite scale factor is not positive")
    dr = r / scale - r
    theta_rad = np.radians(theta)
    disp_x = dr * np.cos(theta_rad)
    disp_y = -dr * np.sin(theta_rad)
    disp_x[center, center] = 0.0  # angle undefined at the singular peak
    disp_y[center, center] = 0.0

    x_map = dx + disp_x
    y_map = dy + disp_y
    du_dy, du_dx = np.gradient(x_map)
    dv_dy, dv_dx = np.gradient(y_map)
    pull_det = du_dx * dv_dy - dv_dx * du_dy
    det_j = np.maximum(
        np.power(np.maximum(pull_det, DET_FLOOR), -compensation), DET_FLOOR
    )
    return DisplacementField(size=s, dx=disp_x, dy=disp_y, det_j=det_j)


def warp_apsf(
    apsf: np.ndarray, displacement: DisplacementField, renormalize: bool = True
) -> np.ndarray:
    """Resample a kernel through a displacement field.

    Each output pixel reads the source kernel at its displaced position
    (bilinear, zero outside) and is divided by the compensation term. A
    zero field with unit divisor is the identity and returns the input
    values unchanged, so the degenerate no-beam case is exact.
    """
    s = apsf.shape[0]
    if s != displacement.size:
        raise SizeMismatchError(f"kernel size {s} vs field size {displacement.size}")
    if (
        not displacement.dx.any()
        and not displacement.dy.any()
        and np.all(displacement.det_j == 1.0)
    ):
        return apsf.copy()
    coords = np.arange(s, dtype=np.float64)
    u = coords[None, :] + displacement.dx
    v = coords[:, None] + displacement.dy
    warped = sample_bilinear(apsf, u, v) / displacement.det_j
    if renormalize:
        return normalize_kernel(warped)
    return warped


def build_alsf(params: AlsfParams, renormalize: bool = True) -> np.ndarray:
    """Generate the base kernel and warp it per the recipe."""
    base = generate_apsf(params.base)
    field_ = build_displacement_field(params)
    return warp_apsf(base, field_, renormalize=renormalize)


def _sample_base(rng: np.random.Generator, image_dims: tuple[int, int]) -> ApsfParams:
    height, width = image_dims
    t = rng.uniform(1.1, 1.8)
    q = rng.uniform(0.2, 0.7)
    scalor = rng.uniform(0.75, 1.5)
    return ApsfParams(T=t, q=q, size=kernel_size(scalor, height, width))


def sample_family_params(
    family: str, rng: np.random.Generator, image_dims: tuple[int, int]
) -> AlsfParams:
    """Draw a kernel recipe for one of the three preset families.

    Draw order is fixed: base (T, q, scalor), kappa, then beams. The
    upward family points a single beam near 90 degrees, the downward
    family mirrors it near 270, and the asymmetric family scatters two
    to four beams over the full circle.
    """
    if family not in FAMILIES:
        raise ParameterError("family", f"unknown kernel family {family!r}")
    base = _sample_base(rng, image_dims)
    kappa = rng.uniform(0.5, 1.0)
    if family == "upward":
        beams = (BeamSpec(rng.uniform(75.0, 105.0), rng.uniform(15.0, 60.0)),)
    elif family == "downward":
        beams = (BeamSpec(rng.uniform(255.0, 285.0), rng.uniform(15.0, 60.0)),)
    else:
        count = int(rng.integers(2, 5))
        beams = tuple(
            BeamSpec(rng.uniform(0.0, 360.0), rng.uniform(15.0, 60.0))
            for _ in range(count)
        )
    return AlsfParams(beams=beams, kappa=kappa, base=base)


def preset_kernel(
    family: str, rng: np.random.Generator, image_dims: tuple[int, int]
) -> tuple[np.ndarray, AlsfParams]:
    """Sample a family recipe and build its kernel. Deterministic per rng state."""
    params = sample_family_params(family, rng, image_dims)
    return build_alsf(params), params
