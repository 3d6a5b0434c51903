"""Core pixel-buffer conventions and small numeric utilities.

Images are plain float64 numpy arrays shaped (H, W, C) with C in {1, 3},
values normalized so decoded input lies in [0, 1]. Masks are boolean
(H, W) arrays. Kernels are square float64 (s, s) arrays with odd s.
Compositing operates directly on stored pixel values by default; an
optional linear-light mode (gamma 2.2 decode/encode) is provided for
pipelines that want radiometrically linear accumulation.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError, SizeMismatchError

GAMMA = 2.2

# Rec. 601 luma weights, used for luminance throughout the toolkit.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def validate_image(image: np.ndarray, name: str = "image") -> np.ndarray:
    """Check buffer shape and finiteness; returns the array unchanged."""
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ParameterError(name, f"expected (H, W, 1|3) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ParameterError(name, "contains NaN or Inf")
    return arr


def require_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape[:2] != b.shape[:2]:
        raise SizeMismatchError(f"{what}: {a.shape[:2]} vs {b.shape[:2]}")


def luminance(image: np.ndarray) -> np.ndarray:
    """Per-pixel luma of an (H, W, C) image; grayscale passes through."""
    if image.shape[2] == 1:
        return image[:, :, 0]
    r, g, b = LUMA_WEIGHTS
    return r * image[:, :, 0] + g * image[:, :, 1] + b * image[:, :, 2]


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[float, float, float]:
    """Standard hexcone HSV -> RGB. h in degrees [0, 360), s and v in [0, 1]."""
    h = h % 360.0
    c = v * s
    hp = h / 60.0
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    sector = int(hp) % 6
    rgb = [
        (c, x, 0.0),
        (x, c, 0.0),
        (0.0, c, x),
        (0.0, x, c),
        (x, 0.0, c),
        (c, 0.0, x),
    ][sector]
    m = v - c
    return (rgb[0] + m, rgb[1] + m, rgb[2] + m)


def normalize_kernel(kernel: np.ndarray) -> np.ndarray:
    """Scale a non-negative kernel to unit sum."""
    total = float(kernel.sum())
    if total <= 0.0 or not np.isfinite(total):
        raise ParameterError("kernel", "cannot normalize: non-positive or non-finite sum")
    return kernel / total


def validate_kernel(kernel: np.ndarray, name: str = "kernel") -> np.ndarray:
    arr = np.asarray(kernel, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(name, f"expected square 2D array, got shape {arr.shape}")
    if arr.shape[0] % 2 == 0:
        raise ParameterError(name, f"size must be odd, got {arr.shape[0]}")
    if (arr < 0).any():
        raise ParameterError(name, "weights must be non-negative")
    return arr


def sample_bilinear(kernel: np.ndarray, u, v):
    """Bilinearly interpolate kernel weights at continuous coordinates.

    u is the horizontal (column) coordinate, v the vertical (row)
    coordinate. Points outside [0, s-1] x [0, s-1] return 0. Accepts
    scalars or arrays; broadcasting follows numpy rules.
    """
    k = np.asarray(kernel, dtype=np.float64)
    s = k.shape[0]
    uu = np.asarray(u, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    inside = (uu >= 0.0) & (uu <= s - 1.0) & (vv >= 0.0) & (vv <= s - 1.0)
    x0 = np.floor(uu).astype(np.intp)
    y0 = np.floor(vv).astype(np.intp)
    fx = uu - x0
    fy = vv - y0
    x0c = np.clip(x0, 0, s - 1)
    x1c = np.clip(x0 + 1, 0, s - 1)
    y0c = np.clip(y0, 0, s - 1)
    y1c = np.clip(y0 + 1, 0, s - 1)
    val = (
        (1.0 - fx) * (1.0 - fy) * k[y0c, x0c]
        + fx * (1.0 - fy) * k[y0c, x1c]
        + (1.0 - fx) * fy * k[y1c, x0c]
        + fx * fy * k[y1c, x1c]
    )
    out = np.where(inside, val, 0.0)
    if np.isscalar(u) and np.isscalar(v):
        return float(out)
    return out


def to_linear(image: np.ndarray) -> np.ndarray:
    """Decode stored values to linear light (power 2.2)."""
    return np.power(np.clip(image, 0.0, None), GAMMA)


def from_linear(image: np.ndarray) -> np.ndarray:
    """Re-encode linear light to stored values (power 1/2.2)."""
    return np.power(np.clip(image, 0.0, None), 1.0 / GAMMA)
