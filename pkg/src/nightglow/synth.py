"""Full degradation pipeline: clean image in, polluted image + layers out.

A polluted frame is the clean frame plus three additive, non-negative
pollution layers: sky glow from hidden sources, directional scattering
from visible sources (per-component anisotropic kernels), and isotropic
scattering toward the camera. All sampled parameters live in a
SynthesisParams value; together with the scene assets they determine
the output bit for bit. Sub-streams (component assignment, hidden-light
placement) are derived from the record seed with tagged SplitMix64
mixing, so replaying a record reproduces the image exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import alsf as alsf_mod
from .alsf import AlsfParams, BeamSpec, build_alsf, sample_family_params
from .apsf import ApsfParams, generate_apsf, kernel_size
from .errors import ParameterError, SizeMismatchError
from .image import from_linear, to_linear, validate_image
from .imgio import encode_png, save_image
from .lightmap import (
    LightSourceMap,
    assign_kernel_types,
    binarize_light_map,
    connected_components,
    render_alsf_layer,
    render_apsf_layer,
)
from .seeding import derive_seed, make_rng
from .skyglow import (
    extract_skyline,
    place_hidden_lights,
    render_sky_glow,
    sample_glow_kernel_params,
)

DEFAULT_VARIANTS = 5

GAIN_RANGES = {"sky": (0.5, 1.0), "alsf": (0.5, 1.0), "apsf": (0.3, 0.8)}

LAYER_ORDER = ("sky", "alsf", "apsf")


@dataclass(frozen=True)
class SceneAssets:
    """Inputs for one scene: clean image, sky mask, visible light map."""

    clean: np.ndarray
    sky_mask: np.ndarray
    lights: LightSourceMap

    def __post_init__(self):
        validate_image(self.clean, "clean")
        if self.sky_mask.shape != self.clean.shape[:2]:
            raise SizeMismatchError(
                f"sky mask {self.sky_mask.shape} vs clean {self.clean.shape[:2]}"
            )
        if self.lights.intensity.shape[:2] != self.clean.shape[:2]:
            raise SizeMismatchError(
                f"light map {self.lights.intensity.shape[:2]} vs clean {self.clean.shape[:2]}"
            )


@dataclass(frozen=True)
class SynthesisParams:
    """Every sampled quantity needed to reproduce one polluted variant."""

    apsf: ApsfParams
    alsf_by_family: tuple[AlsfParams, AlsfParams, AlsfParams]
    sky_kernel: AlsfParams
    gains: tuple[float, float, float]  # (sky, alsf, apsf)
    clip_mode: str
    seed: int

    def __post_init__(self):
        if self.clip_mode not in ("clamp", "none"):
            raise ParameterError("clip_mode", f"must be clamp|none, got {self.clip_mode}")
        if len(self.gains) != 3 or any(
            not np.isfinite(g) or g < 0 for g in self.gains
        ):
            raise ParameterError("gains", f"need 3 finite non-negative gains, got {self.gains}")


@dataclass(frozen=True)
class SynthesisRecord:
    """One paired sample: identifiers, parameters, outputs, digests."""

    scene_id: str
    variant: int
    params: SynthesisParams
    paths: dict
    digests: dict


def sample_params(seed: int, image_dims: tuple[int, int]) -> SynthesisParams:
    """Draw a full parameter set for one variant.

    Fixed draw order: isotropic kernel (T, q, scalor), the three family
    recipes (upward, downward, asymmetric), the sky glow kernel, then
    the three layer gains.
    """
    height, width = image_dims
    if height < 1 or width < 1:
        raise ParameterError("image_dims", f"dims must be positive, got {image_dims}")
    rng = make_rng(derive_seed(seed, "params"))
    apsf = ApsfParams(
        T=rng.uniform(1.1, 1.8),
        q=rng.uniform(0.2, 0.7),
        size=kernel_size(rng.uniform(0.75, 1.5), height, width),
    )
    families = tuple(
        sample_family_params(name, rng, image_dims) for name in alsf_mod.FAMILIES
    )
    sky_kernel = sample_glow_kernel_params(rng, image_dims)
    gains = tuple(float(rng.uniform(*GAIN_RANGES[name])) for name in LAYER_ORDER)
    return SynthesisParams(
        apsf=apsf,
        alsf_by_family=families,
        sky_kernel=sky_kernel,
        gains=gains,
        clip_mode="clamp",
        seed=int(seed),
    )


def derive_hidden_lights(assets: SceneAssets, params: SynthesisParams):
    """Hidden-light placement for this record (seed-derived, reproducible)."""
    skyline = extract_skyline(assets.sky_mask)
    return place_hidden_lights(
        skyline, assets.sky_mask, make_rng(derive_seed(params.seed, "lights"))
    )


def derive_components(assets: SceneAssets):
    """Connected components of the scene's visible light sources."""
    return connected_components(binarize_light_map(assets.lights))


def synthesize(
    assets: SceneAssets, params: SynthesisParams, transfer: str = "stored"
) -> tuple[np.ndarray, dict]:
    """Render the three pollution layers and compose the polluted image.

    Layers are returned unscaled; the composite applies the per-layer
    gains and the clip mode. With transfer="linear" the clean image and
    light map are gamma-decoded first and the result re-encoded; the
    returned layers are then in linear light.
    """
    if transfer not in ("stored", "linear"):
        raise ParameterError("transfer", f"must be stored|linear, got {transfer}")
    clean = assets.clean
    light_map = assets.lights
    if transfer == "linear":
        clean = to_linear(clean)
        light_map = LightSourceMap(
            intensity=to_linear(light_map.intensity), provenance=light_map.provenance
        )
    dims = clean.shape[:2]

    hidden = derive_hidden_lights(assets, params)
    glow_kernel = build_alsf(params.sky_kernel)
    p_sky = render_sky_glow(hidden, glow_kernel, dims)
    if clean.shape[2] == 1:
        p_sky = p_sky.mean(axis=2, keepdims=True)

    # component structure is always derived from stored-domain values
    # (the binarization floor is calibrated for encoded pixels)
    components = derive_components(assets)
    assignment = assign_kernel_types(
        components, make_rng(derive_seed(params.seed, "assign"))
    )
    family_kernels = tuple(build_alsf(p) for p in params.alsf_by_family)
    p_alsf = render_alsf_layer(light_map, components, assignment, family_kernels)

    p_apsf = render_apsf_layer(light_map, generate_apsf(params.apsf))

    g_sky, g_alsf, g_apsf = params.gains
    polluted = clean + g_sky * p_sky
    polluted = polluted + g_alsf * p_alsf
    polluted = polluted + g_apsf * p_apsf
    if params.clip_mode == "clamp":
        polluted = np.clip(polluted, 0.0, 1.0)
    if transfer == "linear":
        polluted = from_linear(polluted)
    return polluted, {"sky": p_sky, "alsf": p_alsf, "apsf": p_apsf}


def image_digest(image: np.ndarray, bitdepth: int = 8) -> str:
    """Hex SHA-256 of the image's canonical PNG encoding."""
    return hashlib.sha256(encode_png(image, bitdepth=bitdepth)).hexdigest()


def variant_seed(master_seed: int, scene_id: str, variant: int) -> int:
    return derive_seed(master_seed, scene_id, variant)


def make_variants(
    assets: SceneAssets,
    scene_id: str,
    master_seed: int,
    n: int = DEFAULT_VARIANTS,
    out_dir: str | Path | None = None,
    emit_layers: bool = False,
) -> list[SynthesisRecord]:
    """Synthesize n polluted variants of one scene.

    Variant k derives its seed from (master_seed, scene_id, k). When
    out_dir is given, each variant's polluted image (and optionally its
    layers) is written there and the record paths filled in.
    """
    if n < 1:
        raise ParameterError("n", f"variant count must be >= 1, got {n}")
    records = []
    for k in range(n):
        seed = variant_seed(master_seed, scene_id, k)
        params = sample_params(seed, assets.clean.shape[:2])
        polluted, layers = synthesize(assets, params)
        digests = {"polluted": image_digest(polluted)}
        paths: dict = {}
        if out_dir is not None:
            # paths are recorded relative to out_dir so manifests stay
            # identical wherever the dataset lands on disk
            directory = Path(out_dir)
            directory.mkdir(parents=True, exist_ok=True)
            name_polluted = f"{scene_id}__v{k}.png"
            save_image(directory / name_polluted, polluted)
            paths["polluted"] = name_polluted
            if emit_layers:
                for name in LAYER_ORDER:
                    layer_name = f"{scene_id}__v{k}__{name}.png"
                    clipped = np.clip(layers[name], 0.0, 1.0)
                    save_image(directory / layer_name, clipped)
                    paths[name] = layer_name
                    digests[name] = image_digest(clipped)
        records.append(
            SynthesisRecord(
                scene_id=scene_id, variant=k, params=params, paths=paths, digests=digests
            )
        )
    return records


# ---------------------------------------------------------------------------
# JSON round-trip of parameter records (full float precision via repr)
# ---------------------------------------------------------------------------

def _apsf_to_dict(p: ApsfParams) -> dict:
    return {"T": p.T, "q": p.q, "size": p.size}


def _alsf_to_dict(p: AlsfParams) -> dict:
    return {
        "kappa": p.kappa,
        "base": _apsf_to_dict(p.base),
        "beams": [
            {"alpha": b.alpha, "sigma": b.sigma, "amplitude": b.amplitude}
            for b in p.beams
        ],
    }


def params_to_dict(params: SynthesisParams) -> dict:
    return {
        "seed": params.seed,
        "clip_mode": params.clip_mode,
        "gains": dict(zip(LAYER_ORDER, params.gains)),
        "apsf": _apsf_to_dict(params.apsf),
        "alsf_by_family": {
            name: _alsf_to_dict(p)
            for name, p in zip(alsf_mod.FAMILIES, params.alsf_by_family)
        },
        "sky_kernel": _alsf_to_dict(params.sky_kernel),
    }


def _apsf_from_dict(d: dict) -> ApsfParams:
    return ApsfParams(T=d["T"], q=d["q"], size=d["size"])


def _alsf_from_dict(d: dict) -> AlsfParams:
    return AlsfParams(
        beams=tuple(
            BeamSpec(alpha=b["alpha"], sigma=b["sigma"], amplitude=b["amplitude"])
            for b in d["beams"]
        ),
        kappa=d["kappa"],
        base=_apsf_from_dict(d["base"]),
    )


def params_from_dict(d: dict) -> SynthesisParams:
    return SynthesisParams(
        apsf=_apsf_from_dict(d["apsf"]),
        alsf_by_family=tuple(
            _alsf_from_dict(d["alsf_by_family"][name]) for name in alsf_mod.FAMILIES
        ),
        sky_kernel=_alsf_from_dict(d["sky_kernel"]),
        gains=tuple(d["gains"][name] for name in LAYER_ORDER),
        clip_mode=d["clip_mode"],
        seed=d["seed"],
    )


def record_to_dict(record: SynthesisRecord) -> dict:
    return {
        "scene_id": record.scene_id,
        "variant": record.variant,
        "params": params_to_dict(record.params),
        "paths": dict(record.paths),
        "digests": dict(record.digests),
    }


def record_from_dict(d: dict) -> SynthesisRecord:
    return SynthesisRecord(
        scene_id=d["scene_id"],
        variant=d["variant"],
        params=params_from_dict(d["params"]),
        paths=dict(d["paths"]),
        digests=dict(d["digests"]),
    )


def save_record(path: str | Path, record: SynthesisRecord) -> None:
    Path(path).write_text(json.dumps(record_to_dict(record), indent=2, sort_keys=True))


def load_record(path: str | Path) -> SynthesisRecord:
    return record_from_dict(json.loads(Path(path).read_text()))
