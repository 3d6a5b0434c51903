"""Skyline-induced sky glow from hidden area lights.

City lights behind the skyline are invisible in the frame yet lift the
sky brightness above it. They are modeled as a handful of colored area
lights tucked just below the skyline (top edge 0-15 px under the lowest
sky row of their column), rasterized into an emission map and convolved
with a wide upward-family kernel. The glow then spills over the skyline
naturally; no masking is applied afterwards.

Light colors follow urban lighting: five saturated base hues (sodium
orange, warm amber, cool blue-white, magenta neon, green neon) with a
multiplicative +/-20% hue jitter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alsf import AlsfParams, BeamSpec
from .apsf import ApsfParams, kernel_size
from .convolve import fft_convolve
from .image import hsv_to_rgb

NO_SKY = -1  # skyline sentinel for columns without any sky pixel

PALETTE_HUES = (30.0, 45.0, 200.0, 300.0, 120.0)
HUE_JITTER = 0.2

MAX_LIGHTS = 4
MAX_PLACEMENT_ATTEMPTS = 64
SKYLINE_DROP = 15  # lights start 0..SKYLINE_DROP px below the skyline

WIDTH_FRACTION = (0.05, 0.25)   # half-extent relative to image width
HEIGHT_FRACTION = (0.01, 0.05)  # half-extent relative to image height
INTENSITY_RANGE = (0.3, 1.0)


@dataclass(frozen=True)
class HiddenLight:
    """One rasterizable area light below the skyline."""

    shape: str  # "ellipse" or "rectangle"
    center: tuple[int, int]  # (row, col)
    half_extents: tuple[int, int]  # (rows, cols)
    color: tuple[float, float, float]
    intensity: float


def extract_skyline(sky_mask: np.ndarray) -> np.ndarray:
    """Lowest sky row per column (row axis downward); NO_SKY where none."""
    m = np.asarray(sky_mask, dtype=bool)
    h = m.shape[0]
    # highest row index that is sky = (h-1) - argmax over the flipped column
    flipped = m[::-1, :]
    first = flipped.argmax(axis=0)
    has_sky = m.any(axis=0)
    skyline = np.where(has_sky, h - 1 - first, NO_SKY)
    return skyline.astype(np.int64)


def _light_footprint(light: HiddenLight, dims: tuple[int, int]) -> np.ndarray:
    h, w = dims
    cy, cx = light.center
    hy, hx = light.half_extents
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    if light.shape == "rectangle":
        return (np.abs(rows - cy) <= hy) & (np.abs(cols - cx) <= hx)
    return ((rows - cy) / max(hy, 1)) ** 2 + ((cols - cx) / max(hx, 1)) ** 2 <= 1.0


def _sample_color(rng: np.random.Generator) -> tuple[float, float, float]:
    base = PALETTE_HUES[int(rng.integers(0, len(PALETTE_HUES)))]
    hue = (base * rng.uniform(1.0 - HUE_JITTER, 1.0 + HUE_JITTER)) % 360.0
    saturation = rng.uniform(0.7, 1.0)
    return hsv_to_rgb(hue, saturation, 1.0)


def place_hidden_lights(
    skyline: np.ndarray, sky_mask: np.ndarray, rng: np.random.Generator
) -> list[HiddenLight]:
    """Rejection-sample non-overlapping hidden lights below the skyline.

    Every covered pixel must be inside the frame, strictly below the
    skyline of its column, not a sky pixel, and disjoint from every
    previously placed light. Each light gets MAX_PLACEMENT_ATTEMPTS
    tries; persistent failures just reduce the light count.
    """
    m = np.asarray(sky_mask, dtype=bool)
    h, w = m.shape
    sky_columns = np.flatnonzero(skyline != NO_SKY)
    if sky_columns.size == 0:
        return []
    target = int(rng.integers(1, MAX_LIGHTS + 1))
    occupied = np.zeros((h, w), dtype=bool)
    lights: list[HiddenLight] = []
    for _ in range(target):
        for _attempt in range(MAX_PLACEMENT_ATTEMPTS):
            col = int(sky_columns[int(rng.integers(0, sky_columns.size))])
            drop = int(rng.integers(0, SKYLINE_DROP + 1))
            half_w = max(1, int(rng.uniform(*WIDTH_FRACTION) * w))
            half_h = max(1, int(rng.uniform(*HEIGHT_FRACTION) * h))
            shape = "ellipse" if rng.uniform() < 0.5 else "rectangle"
            top = int(skyline[col]) + 1 + drop
            light = HiddenLight(
                shape=shape,
                center=(top + half_h, col),
                half_extents=(half_h, half_w),
                color=_sample_color(rng),
                intensity=float(rng.uniform(*INTENSITY_RANGE)),
            )
            cy, cx = light.center
            if cy + half_h >= h or cx - half_w < 0 or cx + half_w >= w:
                continue
            footprint = _light_footprint(light, (h, w))
            rows_cov, cols_cov = np.nonzero(footprint)
            if (m & footprint).any() or (occupied & footprint).any():
                continue
            if (rows_cov <= skyline[cols_cov]).any():
                continue  # partially above some column's skyline
            occupied |= footprint
            lights.append(light)
            break
    return lights


def rasterize_lights(lights: list[HiddenLight], dims: tuple[int, int]) -> np.ndarray:
    """Sum intensity * color of each light footprint into an RGB map."""
    h, w = dims
    emission = np.zeros((h, w, 3), dtype=np.float64)
    for light in lights:
        footprint = _light_footprint(light, dims)
        rgb = np.array(light.color, dtype=np.float64) * light.intensity
        emission[footprint] += rgb
    return emission


def render_sky_glow(
    lights: list[HiddenLight], glow_kernel: np.ndarray, dims: tuple[int, int]
) -> np.ndarray:
    """Convolve the hidden emission map with the upward glow kernel."""
    emission = rasterize_lights(lights, dims)
    if not lights:
        return emission
    return np.maximum(fft_convolve(emission, glow_kernel), 0.0)


def lights_to_json(lights: list[HiddenLight]) -> list[dict]:
    """Serializable form of a hidden-light list for debug export."""
    return [
        {
            "shape": light.shape,
            "center": list(light.center),
            "half_extents": list(light.half_extents),
            "color": list(light.color),
            "intensity": light.intensity,
        }
        for light in lights
    ]


def sample_glow_kernel_params(
    rng: np.random.Generator, image_dims: tuple[int, int]
) -> AlsfParams:
    """Wide upward-beam recipe for diffuse glow from distant sources.

    Fixed draw order: T, q, scalor, kappa, alpha, sigma. Spread angles
    use the wide half of the beam range and the kernel spans at least
    the full image so the glow reaches far across the frame.
    """
    height, width = image_dims
    t = rng.uniform(1.1, 1.8)
    q = rng.uniform(0.2, 0.7)
    scalor = rng.uniform(1.0, 1.5)
    base = ApsfParams(T=t, q=q, size=kernel_size(scalor, height, width))
    kappa = rng.uniform(0.5, 1.0)
    alpha = rng.uniform(75.0, 105.0)
    sigma = rng.uniform(30.0, 60.0)
    return AlsfParams(beams=(BeamSpec(alpha, sigma),), kappa=kappa, base=base)
