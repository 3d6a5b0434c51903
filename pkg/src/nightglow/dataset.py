"""Batch dataset construction with a reproducible manifest.

A dataset root holds one directory per scene containing clean.png,
sky_mask.png and lights.png. Each complete scene yields a fixed number
of polluted variants; scenes missing assets are skipped and listed in
the manifest's warnings. The train/validation split is by scene group
(all variants of one clean image share a split) at a 9:1 group ratio,
chosen by a seed-derived permutation of the sorted group ids so reruns
and different worker counts produce byte-identical manifests.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .imgio import load_image, load_mask
from .lightmap import LightSourceMap
from .seeding import derive_seed, make_rng
from .synth import (
    DEFAULT_VARIANTS,
    SceneAssets,
    make_variants,
    record_to_dict,
    save_record,
)

TOOLKIT_VERSION = "0.1.0"

VAL_GROUP_FRACTION = 10  # one validation group per ten groups

SCENE_FILES = ("clean.png", "sky_mask.png", "lights.png")

WORKERS_ENV = "NIGHTGLOW_WORKERS"


@dataclass(frozen=True)
class ScenePlan:
    scene_id: str
    directory: Path


def scan_scenes(root: str | Path) -> tuple[list[ScenePlan], list[str]]:
    """Find complete scene directories under root, sorted by id.

    Returns (plans, warnings); a warning names each directory that is
    missing one of the required asset files.
    """
    root = Path(root)
    plans: list[ScenePlan] = []
    warnings: list[str] = []
    for entry in sorted(p for p in root.iterdir() if p.is_dir()):
        missing = [name for name in SCENE_FILES if not (entry / name).is_file()]
        if missing:
            warnings.append(f"{entry.name}: missing {', '.join(missing)}")
        else:
            plans.append(ScenePlan(scene_id=entry.name, directory=entry))
    return plans, warnings


def load_scene(directory: str | Path) -> SceneAssets:
    directory = Path(directory)
    clean = load_image(directory / "clean.png")
    sky_mask = load_mask(directory / "sky_mask.png")
    lights_img = load_image(directory / "lights.png")
    if lights_img.shape[2] != clean.shape[2]:
        if lights_img.shape[2] == 1:
            lights_img = lights_img.repeat(clean.shape[2], axis=2)
        else:
            lights_img = lights_img.mean(axis=2, keepdims=True)
    lights = LightSourceMap(intensity=lights_img, provenance="external_file")
    return SceneAssets(clean=clean, sky_mask=sky_mask, lights=lights)


def split_groups(group_ids: list[str], master_seed: int) -> dict:
    """Assign each group to train or val at a 9:1 group ratio.

    Sorted ids are shuffled by a seed-derived permutation; the last
    floor(n/10) groups (at least one once there are two or more) become
    validation. Depends only on the seed and the sorted ids.
    """
    ordered = sorted(group_ids)
    n = len(ordered)
    rng = make_rng(derive_seed(master_seed, "split"))
    permuted = [ordered[i] for i in rng.permutation(n)]
    n_val = max(1, n // VAL_GROUP_FRACTION) if n >= 2 else 0
    val = set(permuted[n - n_val :]) if n_val else set()
    return {gid: ("val" if gid in val else "train") for gid in ordered}


def _build_scene(args) -> tuple[str, list[dict]]:
    plan_dir, scene_id, master_seed, n_variants, out_dir, emit_layers = args
    assets = load_scene(plan_dir)
    records = make_variants(
        assets,
        scene_id,
        master_seed,
        n=n_variants,
        out_dir=Path(out_dir) / scene_id,
        emit_layers=emit_layers,
    )
    dicts = []
    for record in records:
        save_record(
            Path(out_dir) / scene_id / f"{scene_id}__v{record.variant}.json", record
        )
        d = record_to_dict(record)
        # manifest paths are relative to the dataset root
        d["paths"] = {key: f"{scene_id}/{name}" for key, name in d["paths"].items()}
        dicts.append(d)
    return scene_id, dicts


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def build_dataset(
    root: str | Path,
    out_dir: str | Path,
    master_seed: int,
    n_variants: int = DEFAULT_VARIANTS,
    workers: int | None = None,
    emit_layers: bool = False,
) -> dict:
    """Synthesize the paired dataset and write manifest.json.

    The manifest lists toolkit version, master seed, per-variant records
    (parameters, paths, digests), the group split, and warnings for
    skipped scenes. Its content is independent of worker count.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plans, warnings = scan_scenes(root)
    if workers is None:
        workers = default_workers()

    jobs = [
        (str(p.directory), p.scene_id, master_seed, n_variants, str(out_dir), emit_layers)
        for p in plans
    ]
    results: dict[str, list[dict]] = {}
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for scene_id, records in pool.map(_build_scene, jobs):
                results[scene_id] = records
    else:
        for job in jobs:
            scene_id, records = _build_scene(job)
            results[scene_id] = records

    split = split_groups([p.scene_id for p in plans], master_seed)
    manifest = {
        "toolkit_version": TOOLKIT_VERSION,
        "master_seed": int(master_seed),
        "n_variants": int(n_variants),
        "split": split,
        "records": [
            record for sid in sorted(results) for record in results[sid]
        ],
        "warnings": warnings,
    }
    manifest_path = out_dir / "manifest.json"
    payload = json.dumps(manifest, indent=2, sort_keys=True)
    tmp = manifest_path.with_name(manifest_path.name + ".tmp")
    tmp.write_text(payload)
    tmp.replace(manifest_path)
    return manifest


def manifest_digest(manifest: dict) -> str:
    """Hex SHA-256 of the canonical (sorted-key) JSON serialization."""
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
