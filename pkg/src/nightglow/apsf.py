"""Isotropic atmospheric point spread function kernels.

A point source seen through a multiply-scattering atmosphere spreads
into a radially symmetric halo. The angular intensity is evaluated as a
Legendre series in mu = cos(angle):

    I(mu) = sum_{m>=1} (g_m + g_{m+1}) L_m(mu)
    g_m   = exp(-beta_m * T - (m + 1) * ln T)
    beta_m = ((2m + 1) / m) * (1 - q^(m-1))

where T is the optical thickness of the medium and q in (0, 1) weights
forward versus isotropic scattering. The series is truncated once the
largest term magnitude falls below 1e-6 (or at m = 100), and any small
negative excursions from truncation are clamped to zero. The overall
scale is irrelevant because kernels are normalized to unit sum.

The kernel maps pixel radius to scattering angle linearly: a pixel at
normalized radius rho in [0, 1] (rho = 1 at half the kernel width)
corresponds to mu = cos(rho * pi), so the kernel edge is full
back-scatter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .image import normalize_kernel

MAX_SERIES_TERMS = 100
SERIES_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ApsfParams:
    """Scattering kernel parameters: optical thickness, forward weight, size."""

    T: float
    q: float
    size: int

    def __post_init__(self):
        if not (0.0 < self.T <= 4.0):
            raise ParameterError("T", f"optical thickness must be in (0, 4], got {self.T}")
        if not (0.0 < self.q < 1.0):
            raise ParameterError("q", f"scattering coefficient must be in (0, 1), got {self.q}")
        if self.size < 3 or self.size % 2 == 0:
            raise ParameterError("size", f"kernel size must be odd and >= 3, got {self.size}")


def kernel_size(scalor: float, height: int, width: int) -> int:
    """Kernel size floor(scalor * max(H, W)), forced odd, at least 3."""
    s = int(scalor * max(height, width))
    if s % 2 == 0:
        s += 1
    return max(3, s)


def apsf_radial_profile(
    params: ApsfParams, n_samples: int = 256
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the scattering profile on an even grid of radius fractions.

    Returns (radius_fraction, intensity), both length n_samples, with
    radius_fraction spanning [0, 1]. Intensities are non-negative.
    """
    if n_samples < 2:
        raise ParameterError("n_samples", f"need at least 2 samples, got {n_samples}")
    rho = np.linspace(0.0, 1.0, n_samples)
    mu = np.cos(rho * np.pi)
    total = np.zeros_like(mu)
    log_t = np.log(params.T)
    leg_prev = np.ones_like(mu)  # L_0
    leg = mu.copy()              # L_1

    def g(m: int) -> float:
        beta = ((2.0 * m + 1.0) / m) * (1.0 - params.q ** (m - 1.0))
        return float(np.exp(-beta * params.T - (m + 1.0) * log_t))

    gm = g(1)
    for m in range(1, MAX_SERIES_TERMS + 1):
        gm_next = g(m + 1)
        term = (gm + gm_next) * leg
        if not np.isfinite(term).all():
            raise ParameterError("T", "scattering series produced non-finite terms")
        total += term
        if np.abs(term).max() < SERIES_TOLERANCE:
            break
        gm = gm_next
        leg_prev, leg = leg, ((2.0 * m + 1.0) * mu * leg - m * leg_prev) / (m + 1.0)

    return rho, np.maximum(total, 0.0)


def generate_apsf(params: ApsfParams, n_profile: int | None = None) -> np.ndarray:
    """Build the radially symmetric kernel for the given parameters.

    Pixel offsets map to normalized radius min(1, r / (s/2)); weights
    come from linear interpolation of the radial profile, then the
    kernel is normalized to unit sum.
    """
    s = params.size
    rho_grid, profile = apsf_radial_profile(params, n_profile or max(64, s))
    center = s // 2
    offsets = np.arange(s, dtype=np.float64) - center
    dx = offsets[None, :]
    dy = offsets[:, None]
    rho = np.minimum(1.0, np.sqrt(dx * dx + dy * dy) / (s / 2.0))
    kernel = np.interp(rho, rho_grid, profile)
    return normalize_kernel(kernel)
