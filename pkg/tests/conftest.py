import numpy as np
import pytest

from nightglow.imgio import save_image
from nightglow.lightmap import LightSourceMap
from nightglow.synth import SceneAssets


def make_scene_arrays(height, width, seed):
    """Deterministic synthetic scene: dark clean image, sky mask, lights."""
    rng = np.random.default_rng(seed)
    clean = rng.uniform(0.0, 0.25, size=(height, width, 3))
    # gentle vertical gradient so the frame looks like a night sky over ground
    clean *= np.linspace(0.6, 1.0, height)[:, None, None]

    skyline_rows = (
        height // 3
        + (height // 8 * np.sin(np.linspace(0, 3.0, width) + rng.uniform(0, 6.283)))
    ).astype(int)
    skyline_rows = np.clip(skyline_rows, 2, height - 8)
    rows = np.arange(height)[:, None]
    sky_mask = rows <= skyline_rows[None, :]

    lights = np.zeros((height, width, 3))
    n_lights = int(rng.integers(2, 5))
    for _ in range(n_lights):
        r = int(rng.integers(height // 2, height - 2))
        c = int(rng.integers(2, width - 2))
        color = rng.uniform(0.6, 1.0, size=3)
        lights[r - 1 : r + 2, c - 1 : c + 2] = color
    lights[sky_mask] = 0.0
    return clean, sky_mask, lights


def write_scene_dir(path, height, width, seed):
    path.mkdir(parents=True, exist_ok=True)
    clean, sky_mask, lights = make_scene_arrays(height, width, seed)
    save_image(path / "clean.png", clean)
    save_image(path / "sky_mask.png", sky_mask.astype(float)[:, :, None])
    save_image(path / "lights.png", lights)
    return path


def assets_from_arrays(clean, sky_mask, lights):
    return SceneAssets(
        clean=clean,
        sky_mask=sky_mask,
        lights=LightSourceMap(intensity=lights, provenance="external_file"),
    )


@pytest.fixture
def small_assets():
    """A 48x48 scene loaded straight from arrays (no file round trip)."""
    clean, sky_mask, lights = make_scene_arrays(48, 48, seed=11)
    return assets_from_arrays(clean, sky_mask, lights)


@pytest.fixture
def scene_root(tmp_path):
    """Dataset root with three complete scenes on disk."""
    root = tmp_path / "scenes"
    for k in range(3):
        write_scene_dir(root / f"scene{k:02d}", 40, 40, seed=100 + k)
    return root
