"""Visible light sources: extraction, component labeling, glow rendering.

A light source map holds the per-pixel radiance of visible emitters.
Sources are split into 8-connected components; each component is
randomly assigned one of the three directional kernel families and the
per-family grouped maps are convolved and accumulated into the
anisotropic glow layer. The isotropic layer convolves the whole map
with a single kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolve import fft_convolve
from .errors import ParameterError
from .image import luminance, require_same_shape, validate_image

# Pixels count as source when any channel exceeds this floor; tolerates
# encoder noise around true black.
BINARIZE_FLOOR = 0.02

DEFAULT_MIN_AREA = 4

N_KERNEL_TYPES = 3


@dataclass(frozen=True)
class LightSourceMap:
    """Non-negative emitter radiance plus where it came from."""

    intensity: np.ndarray
    provenance: str  # "external_file" or "threshold_fallback"

    def __post_init__(self):
        validate_image(self.intensity, "light map")
        if (self.intensity < 0).any():
            raise ParameterError("light map", "intensities must be >= 0")


@dataclass(frozen=True)
class ComponentMap:
    """8-connected component labeling: 0 is background, labels are 1..count."""

    labels: np.ndarray
    count: int
    areas: np.ndarray


def extract_lights_threshold(image: np.ndarray, tau: float) -> LightSourceMap:
    """Keep pixels whose luminance reaches tau; zero everything else."""
    if not (0.0 < tau < 1.0):
        raise ParameterError("tau", f"threshold must be in (0, 1), got {tau}")
    img = validate_image(image)
    keep = luminance(img) >= tau
    return LightSourceMap(
        intensity=np.where(keep[:, :, None], img, 0.0),
        provenance="threshold_fallback",
    )


def connected_components(mask: np.ndarray, min_area: int = DEFAULT_MIN_AREA) -> ComponentMap:
    """Label 8-connected regions, dropping those smaller than min_area.

    Surviving labels are compacted to 1..count in first-encounter raster
    order (row-major scan).
    """
    if min_area < 1:
        raise ParameterError("min_area", f"must be >= 1, got {min_area}")
    m = np.asarray(mask, dtype=bool)
    h, w = m.shape
    labels = np.zeros((h, w), dtype=np.int32)
    parent: list[int] = [0]  # union-find over provisional labels

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    next_label = 1
    for y in range(h):
        row = m[y]
        for x in range(w):
            if not row[x]:
                continue
            neighbors = []
            if x > 0 and row[x - 1]:
                neighbors.append(labels[y, x - 1])
            if y > 0:
                up = labels[y - 1]
                if up[x]:
                    neighbors.append(up[x])
                if x > 0 and up[x - 1]:
                    neighbors.append(up[x - 1])
                if x + 1 < w and up[x + 1]:
                    neighbors.append(up[x + 1])
            if not neighbors:
                labels[y, x] = next_label
                parent.append(next_label)
                next_label += 1
            else:
                roots = [find(int(n)) for n in neighbors]
                target = min(roots)
                labels[y, x] = target
                for rt in roots:
                    if rt != target:
                        parent[rt] = target

    if next_label == 1:
        return ComponentMap(labels=labels, count=0, areas=np.zeros(0, dtype=np.int64))

    # resolve provisional labels, then filter and compact in raster order
    roots = np.array([find(i) for i in range(next_label)], dtype=np.int32)
    resolved = roots[labels]
    areas = np.bincount(resolved.ravel(), minlength=next_label)
    remap = np.zeros(next_label, dtype=np.int32)
    count = 0
    flat = resolved.ravel()
    for value in flat:
        if value and remap[value] == 0 and areas[value] >= min_area:
            count += 1
            remap[value] = count
    final = remap[resolved]
    final_areas = np.bincount(final.ravel(), minlength=count + 1)[1:]
    return ComponentMap(labels=final, count=count, areas=final_areas.astype(np.int64))


def binarize_light_map(light_map: LightSourceMap) -> np.ndarray:
    """Boolean source mask: any channel above the binarization floor."""
    return light_map.intensity.max(axis=2) > BINARIZE_FLOOR


def assign_kernel_types(components: ComponentMap, rng: np.random.Generator) -> np.ndarray:
    """Uniformly draw one kernel type in {0, 1, 2} per component.

    One independent draw per component, in label order. Entry i holds
    the type for label i + 1.
    """
    return rng.integers(0, N_KERNEL_TYPES, size=components.count).astype(np.int64)


def render_alsf_layer(
    light_map: LightSourceMap,
    components: ComponentMap,
    assignment: np.ndarray,
    kernels: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> np.ndarray:
    """Accumulate per-family grouped convolutions into the directional layer.

    Component intensities with the same assigned type are summed into one
    grouped map and convolved once with that type's kernel; the three
    results accumulate in fixed type order so output is scheduling-stable.
    """
    if len(kernels) != N_KERNEL_TYPES:
        raise ParameterError("kernels", f"need {N_KERNEL_TYPES} kernels, got {len(kernels)}")
    if len(assignment) != components.count:
        raise ParameterError(
            "assignment", f"expected {components.count} entries, got {len(assignment)}"
        )
    intensity = light_map.intensity
    require_same_shape(intensity, components.labels[:, :, None], "light map vs labels")
    out = np.zeros_like(intensity)
    if components.count == 0:
        return out
    for ktype in range(N_KERNEL_TYPES):
        chosen = np.flatnonzero(assignment == ktype) + 1
        if chosen.size == 0:
            continue
        member = np.isin(components.labels, chosen)
        grouped = np.where(member[:, :, None], intensity, 0.0)
        out += fft_convolve(grouped, kernels[ktype])
    return np.maximum(out, 0.0)


def render_apsf_layer(light_map: LightSourceMap, kernel: np.ndarray) -> np.ndarray:
    """Convolve the whole light map with one isotropic kernel."""
    return np.maximum(fft_convolve(light_map.intensity, kernel), 0.0)


def save_label_map(path, components: ComponentMap) -> None:
    """Debug export: raw component labels as a 16-bit PGM image."""
    from .imgio import save_image

    save_image(path, components.labels.astype(np.float64)[:, :, None] / 65535.0, bitdepth=16)
