"""Full-reference quality metrics: PSNR and single-scale SSIM.

PSNR uses peak 1.0 with the mean squared error taken over all pixels
and channels; identical inputs return +inf. SSIM is the standard
single-scale variant on the luma channel: 11x11 Gaussian window with
sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0, averaged over the
valid (fully overlapping) window positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SizeMismatchError
from .image import luminance

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _as_planar(image: np.ndarray) -> np.ndarray:
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB; +inf for identical inputs."""
    x = _as_planar(a)
    y = _as_planar(b)
    if x.shape != y.shape:
        raise SizeMismatchError(f"psnr inputs differ: {x.shape} vs {y.shape}")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def _filter_valid(arr: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Separable valid-mode filtering with a 1D window along both axes."""
    n = window.size
    view = np.lib.stride_tricks.sliding_window_view(arr, n, axis=1)
    arr = np.tensordot(view, window, axes=([2], [0]))
    view = np.lib.stride_tricks.sliding_window_view(arr, n, axis=0)
    return np.tensordot(view, window, axes=([2], [0]))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity on luma; 1.0 for identical inputs."""
    x = _as_planar(a)
    y = _as_planar(b)
    if x.shape != y.shape:
        raise SizeMismatchError(f"ssim inputs differ: {x.shape} vs {y.shape}")
    if min(x.shape[0], x.shape[1]) < SSIM_WINDOW:
        raise ParameterError(
            "image", f"ssim needs min(H, W) >= {SSIM_WINDOW}, got {x.shape[:2]}"
        )
    lx = luminance(x)
    ly = luminance(y)
    window = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    mu_x = _filter_valid(lx, window)
    mu_y = _filter_valid(ly, window)
    xx = _filter_valid(lx * lx, window) - mu_x * mu_x
    yy = _filter_valid(ly * ly, window) - mu_y * mu_y
    xy = _filter_valid(lx * ly, window) - mu_x * mu_y
    c1 = SSIM_K1 * SSIM_K1
    c2 = SSIM_K2 * SSIM_K2
    score_map = ((2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    )
    return float(score_map.mean())


@dataclass(frozen=True)
class MetricReport:
    """Per-pair metric rows plus their aggregate means."""

    rows: tuple  # (path_a, path_b, psnr_db, ssim) per evaluated pair
    errors: tuple  # (path_a, path_b, message) per failed pair

    @property
    def count(self) -> int:
        return len(self.rows)

    @property
    def mean_psnr(self) -> float:
        if not self.rows:
            return math.nan
        return float(np.mean([row[2] for row in self.rows]))

    @property
    def mean_ssim(self) -> float:
        if not self.rows:
            return math.nan
        return float(np.mean([row[3] for row in self.rows]))


def evaluate_pairs(pairs, loader) -> MetricReport:
    """Score (restored, reference) path pairs; failures recorded, not fatal."""
    rows = []
    errors = []
    for path_a, path_b in pairs:
        try:
            img_a = loader(path_a)
            img_b = loader(path_b)
            rows.append((str(path_a), str(path_b), psnr(img_a, img_b), ssim(img_a, img_b)))
        except Exception as exc:  # per-row isolation: the run continues
            errors.append((str(path_a), str(path_b), str(exc)))
    return MetricReport(rows=tuple(rows), errors=tuple(errors))
