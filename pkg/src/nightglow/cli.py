"""Command-line frontend: kernel | synth | dataset | eval | extract-lights.

Fatal failures print one machine-readable JSON object to stderr and
exit nonzero; per-row problems (eval) are reported in the summary and
do not stop the run. The NIGHTGLOW_WORKERS environment variable caps
the dataset worker pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import alsf as alsf_mod
from . import dataset as dataset_mod
from .alsf import AlsfParams, BeamSpec, build_displacement_field, warp_apsf
from .apsf import ApsfParams, generate_apsf
from .errors import NightglowError, ParameterError
from .imgio import load_image, load_mask, save_image, save_kernel_heatmap
from .lightmap import LightSourceMap, extract_lights_threshold
from .lightmap import save_label_map
from .metrics import evaluate_pairs
from .seeding import derive_seed, make_rng
from .skyglow import lights_to_json, rasterize_lights
from .synth import (
    SceneAssets,
    derive_components,
    derive_hidden_lights,
    sample_params,
    save_record,
    synthesize,
    SynthesisRecord,
    image_digest,
)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------

def _kernel_params(args) -> AlsfParams:
    if args.family is not None:
        rng = make_rng(derive_seed(args.seed, "kernel"))
        params = alsf_mod.sample_family_params(
            args.family, rng, (args.height, args.width)
        )
    else:
        params = AlsfParams(
            beams=(BeamSpec(alpha=90.0, sigma=30.0),),
            kappa=0.7,
            base=ApsfParams(T=1.45, q=0.45, size=129),
        )
    base = params.base
    if args.T is not None or args.q is not None or args.size is not None:
        base = ApsfParams(
            T=args.T if args.T is not None else base.T,
            q=args.q if args.q is not None else base.q,
            size=args.size if args.size is not None else base.size,
        )
        params = replace(params, base=base)
    if args.alpha is not None or args.sigma is not None or args.A is not None:
        first = params.beams[0]
        beam = BeamSpec(
            alpha=args.alpha if args.alpha is not None else first.alpha,
            sigma=args.sigma if args.sigma is not None else first.sigma,
            amplitude=args.A if args.A is not None else first.amplitude,
        )
        params = replace(params, beams=(beam,) + params.beams[1:])
    if args.kappa is not None:
        params = replace(params, kappa=args.kappa)
    return params


def _sections_rows(kernel: np.ndarray):
    s = kernel.shape[0]
    c = s // 2
    for i in range(s):
        offset = i - c
        yield (offset, abs(offset) / (s / 2.0), kernel[c, i], kernel[i, c])


def cmd_kernel(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    params = _kernel_params(args)
    apsf_kernel = generate_apsf(params.base)
    field = build_displacement_field(params)
    alsf_kernel = warp_apsf(apsf_kernel, field)

    save_kernel_heatmap(out / "apsf.pgm", apsf_kernel)
    save_kernel_heatmap(out / "alsf.pgm", alsf_kernel)
    s = field.size
    coords = np.arange(s) - s // 2
    _write_csv(
        out / "field.csv",
        ["x", "y", "dx", "dy"],
        (
            (int(coords[j]), int(coords[i]), field.dx[i, j], field.dy[i, j])
            for i in range(s)
            for j in range(s)
        ),
    )
    header = ["offset_px", "radius_fraction", "horizontal", "vertical"]
    _write_csv(out / "apsf_sections.csv", header, _sections_rows(apsf_kernel))
    _write_csv(out / "alsf_sections.csv", header, _sections_rows(alsf_kernel))

    if args.figures:
        from . import plots

        plots.save_kernel_heatmaps(out / "fig_kernels.png", apsf_kernel, alsf_kernel)
        plots.save_cross_sections(out / "fig_sections.png", apsf_kernel, alsf_kernel)
        plots.save_field_quiver(out / "fig_field.png", field)
    print(f"kernel exports written to {out}")
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

def _load_scene_assets(args) -> SceneAssets:
    scene = Path(args.scene)
    clean_path = scene / "clean.png"
    mask_path = scene / "sky_mask.png"
    lights_path = scene / "lights.png"
    for required in (clean_path, mask_path):
        if not required.is_file():
            raise ParameterError("scene", f"missing required asset {required}")
    clean = load_image(clean_path)
    sky_mask = load_mask(mask_path)
    if args.extract_lights:
        lights = extract_lights_threshold(clean, args.tau)
    else:
        if not lights_path.is_file():
            raise ParameterError(
                "scene",
                f"missing required asset {lights_path} (or pass --extract-lights)",
            )
        intensity = load_image(lights_path)
        if intensity.shape[2] != clean.shape[2]:
            intensity = (
                intensity.repeat(clean.shape[2], axis=2)
                if intensity.shape[2] == 1
                else intensity.mean(axis=2, keepdims=True)
            )
        lights = LightSourceMap(intensity=intensity, provenance="external_file")
    return SceneAssets(clean=clean, sky_mask=sky_mask, lights=lights)


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    assets = _load_scene_assets(args)
    params = sample_params(args.seed, assets.clean.shape[:2])
    if args.gains is not None:
        gains = tuple(float(g) for g in args.gains.split(","))
        if len(gains) != 3:
            raise ParameterError("gains", "expected three comma-separated values")
        params = replace(params, gains=gains)
    polluted, layers = synthesize(assets, params, transfer=args.transfer)
    save_image(out / "polluted.png", polluted)
    digests = {"polluted": image_digest(polluted)}
    paths = {"polluted": "polluted.png"}
    if args.emit_layers:
        for name in ("sky", "alsf", "apsf"):
            clipped = np.clip(layers[name], 0.0, 1.0)
            save_image(out / f"layer_{name}.png", clipped)
            paths[name] = f"layer_{name}.png"
            digests[name] = image_digest(clipped)
    record = SynthesisRecord(
        scene_id=Path(args.scene).name,
        variant=0,
        params=params,
        paths=paths,
        digests=digests,
    )
    save_record(out / "record.json", record)
    if args.debug:
        hidden = derive_hidden_lights(assets, params)
        emission = rasterize_lights(hidden, assets.clean.shape[:2])
        save_image(out / "sky_emission.png", np.clip(emission, 0.0, 1.0))
        (out / "hidden_lights.json").write_text(
            json.dumps(lights_to_json(hidden), indent=2)
        )
        save_label_map(out / "components.pgm", derive_components(assets))
    print(f"polluted image and record written to {out}")
    return 0


# ---------------------------------------------------------------------------
# dataset
# ---------------------------------------------------------------------------

def cmd_dataset(args) -> int:
    manifest = dataset_mod.build_dataset(
        args.root,
        args.out,
        master_seed=args.master_seed,
        n_variants=args.variants,
        workers=args.workers,
        emit_layers=args.emit_layers,
    )
    split = manifest["split"]
    n_train = sum(1 for v in split.values() if v == "train")
    n_val = sum(1 for v in split.values() if v == "val")
    print(
        f"dataset: {len(manifest['records'])} pairs from {len(split)} scenes "
        f"({n_train} train / {n_val} val groups), "
        f"digest {dataset_mod.manifest_digest(manifest)[:16]}"
    )
    for warning in manifest["warnings"]:
        print(f"warning: skipped {warning}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    pairs = []
    with open(args.pairs, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) < 2:
                raise ParameterError("pairs", f"row needs two paths, got {row}")
            pairs.append((row[0].strip(), row[1].strip()))
    report = evaluate_pairs(pairs, load_image)
    _write_csv(
        out / "eval.csv",
        ["path_a", "path_b", "psnr_db", "ssim"],
        report.rows,
    )
    summary = {
        "count": report.count,
        "mean_psnr_db": report.mean_psnr if report.count else None,
        "mean_ssim": report.mean_ssim if report.count else None,
        "errors": [
            {"path_a": a, "path_b": b, "message": msg} for a, b, msg in report.errors
        ],
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    if args.figures and report.count:
        from . import plots

        plots.save_metric_histograms(out / "fig_metrics.png", report.rows)
    for a, b, msg in report.errors:
        print(f"error: ({a}, {b}): {msg}", file=sys.stderr)
    print(f"evaluated {report.count} pairs, report in {out}")
    return 0


# ---------------------------------------------------------------------------
# extract-lights
# ---------------------------------------------------------------------------

def cmd_extract_lights(args) -> int:
    image = load_image(args.image)
    lights = extract_lights_threshold(image, args.tau)
    save_image(args.out, lights.intensity)
    print(f"light source map written to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def _apply_config(args, argv) -> None:
    """Fill flags from a JSON config file; explicit CLI flags win."""
    cfg = json.loads(Path(args.config).read_text())
    if not isinstance(cfg, dict):
        raise ParameterError("config", "config file must hold a JSON object")
    given = list(argv)
    for key, value in cfg.items():
        if key in ("config", "command", "scene", "root", "image") or not hasattr(args, key):
            raise ParameterError("config", f"unknown option {key!r}")
        flag = "--" + key.replace("_", "-")
        explicit = any(tok == flag or tok.startswith(flag + "=") for tok in given)
        if not explicit:
            setattr(args, key, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nightglow",
        description="Light pollution simulation and paired-dataset construction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument("--config", help="JSON file of option defaults; flags override")

    k = sub.add_parser("kernel", help="export scattering kernels and field data")
    add_config(k)
    k.add_argument("--out", required=True)
    k.add_argument("--family", choices=alsf_mod.FAMILIES)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--width", type=int, default=256)
    k.add_argument("--height", type=int, default=256)
    k.add_argument("--T", type=float, dest="T")
    k.add_argument("--q", type=float)
    k.add_argument("--size", type=int)
    k.add_argument("--alpha", type=float)
    k.add_argument("--sigma", type=float)
    k.add_argument("--A", type=float, dest="A")
    k.add_argument("--kappa", type=float)
    k.add_argument("--figures", action="store_true")
    k.set_defaults(func=cmd_kernel)

    s = sub.add_parser("synth", help="pollute one scene")
    add_config(s)
    s.add_argument("scene")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--gains")
    s.add_argument("--emit-layers", action="store_true")
    s.add_argument("--extract-lights", action="store_true")
    s.add_argument("--tau", type=float, default=0.9)
    s.add_argument("--transfer", choices=("stored", "linear"), default="stored")
    s.add_argument("--debug", action="store_true",
                   help="also export hidden-light emission, light list, component labels")
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("dataset", help="build the paired dataset with a manifest")
    add_config(d)
    d.add_argument("root")
    d.add_argument("--out", required=True)
    d.add_argument("--master-seed", type=int, default=0)
    d.add_argument("--variants", type=int, default=5)
    d.add_argument("--workers", type=int, default=None)
    d.add_argument("--emit-layers", action="store_true")
    d.set_defaults(func=cmd_dataset)

    e = sub.add_parser("eval", help="PSNR/SSIM over (restored, reference) pairs")
    add_config(e)
    e.add_argument("--pairs", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--figures", action="store_true")
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("extract-lights", help="threshold fallback light extraction")
    add_config(x)
    x.add_argument("image")
    x.add_argument("--out", required=True)
    x.add_argument("--tau", type=float, default=0.9)
    x.set_defaults(func=cmd_extract_lights)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(args, argv)
        return args.func(args)
    except NightglowError as exc:
        payload = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, ParameterError):
            payload["field"] = exc.field
        print(json.dumps(payload), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": str(exc), "type": "OSError"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
