"""Command-line interface.

Exit codes: 0 on success, 1 on a domain error (bad input data, missing
files, undefined operations), 2 on usage errors. Every subcommand also
accepts ``--config FILE`` with flat ``key = value`` lines; explicit
flags always win over the file, and unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, defaults
from .bench import (
    emit_report,
    evaluate_run,
    index_mask_files,
    load_split,
    make_report,
    rank_configs,
    report_from_json,
)
from .errors import ConfigError, FaultBenchError
from .faultlab import (
    find_contradiction_pair,
    run_sparsity_experiment,
    sparsity_trial_masks,
)
from .morph import standardize
from .preprocess import (
    Axis,
    PadPolicy,
    TilingSpec,
    extract_section,
    load_patches,
    normalize_minmax,
    normalize_zscore,
    stitch,
    save_patches,
    tile,
    volume_std,
)
from .threshold import default_grid, ods_search
from .types import ProbabilityMap, SeismicVolume
from .volume_io import (
    load_mask,
    load_probability_map,
    load_volume,
    read_npy,
    save_mask,
    save_volume,
    write_npy,
)


# ---------------------------------------------------------------------------
# Argument value parsers
# ---------------------------------------------------------------------------

def _shape3(text: str) -> tuple[int, int, int]:
    parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"shape needs three comma-separated integers, got {text!r}"
        )
    return tuple(int(p) for p in parts)  # type: ignore[return-value]


def _int_pair(text: str) -> tuple[int, int]:
    parts = [p for p in text.replace("x", ",").split(",") if p.strip()]
    if len(parts) == 1:
        v = int(parts[0])
        return (v, v)
    if len(parts) == 2:
        return (int(parts[0]), int(parts[1]))
    raise argparse.ArgumentTypeError(
        f"expected N or H,W, got {text!r}"
    )


_BOOL_WORDS = {
    "1": True, "true": True, "yes": True, "on": True,
    "0": False, "false": False, "no": False, "off": False,
}


def _parse_bool(text: str) -> bool:
    value = _BOOL_WORDS.get(text.strip().lower())
    if value is None:
        raise ConfigError(f"expected a boolean, got {text!r}")
    return value


# ---------------------------------------------------------------------------
# Config file merging
# ---------------------------------------------------------------------------

def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not key:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        out[key] = value.strip()
    return out


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset flags from --config, then apply hard defaults."""
    sub: argparse.ArgumentParser = args._sub
    actions = {
        a.dest: a
        for a in sub._actions
        if a.dest not in ("help", "config") and a.dest.isidentifier()
    }
    if getattr(args, "config", None) is not None:
        cfg = _parse_config_file(args.config)
        unknown = sorted(set(cfg) - set(actions))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key, raw in cfg.items():
            if getattr(args, key, None) is not None:
                continue  # explicit flag wins
            action = actions[key]
            if isinstance(action, argparse._StoreTrueAction):
                value = _parse_bool(raw)
            elif action.type is not None:
                try:
                    value = action.type(raw)
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    raise ConfigError(f"config key {key}: {exc}") from exc
            else:
                value = raw
            if action.choices is not None and value not in action.choices:
                raise ConfigError(
                    f"config key {key}: {value!r} not in {sorted(action.choices)}"
                )
            setattr(args, key, value)
    for key, value in getattr(args, "_hard", {}).items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _load_volume_arg(args, attr: str = "in_path") -> SeismicVolume:
    return load_volume(
        getattr(args, attr),
        shape=getattr(args, "shape", None),
        byte_order=getattr(args, "byte_order", "little") or "little",
        inline_byte=getattr(args, "inline_byte", None) or 189,
        crossline_byte=getattr(args, "crossline_byte", None) or 193,
    )


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_ingest(args) -> int:
    volume = _load_volume_arg(args)
    save_volume(volume, args.out, byte_order=args.byte_order,
                format_code=args.format_code)
    print(
        f"wrote {args.out}"
        f" shape={volume.inline_count}x{volume.crossline_count}"
        f"x{volume.sample_count}"
    )
    return 0


def _cmd_normalize(args) -> int:
    volume = _load_volume_arg(args)
    op = normalize_minmax if args.mode == "minmax" else normalize_zscore
    save_volume(op(volume), args.out)
    print(f"wrote {args.out} mode={args.mode}")
    return 0


def _cmd_tile(args) -> int:
    obj = read_npy(args.in_path)
    if isinstance(obj, SeismicVolume):
        if args.index is None:
            raise ConfigError("tiling a 3-D volume needs --index (and --axis)")
        axis = Axis(args.axis)
        section = extract_section(obj, axis, args.index)
        values = section.values
        source = section
    elif isinstance(obj, ProbabilityMap):
        values = obj.values.astype(np.float32)
        source = values
    else:
        values = obj.grid.astype(np.float32)
        source = values
    stride = args.stride if args.stride is not None else args.window
    spec = TilingSpec(
        window_h=args.window[0], window_w=args.window[1],
        stride_h=stride[0], stride_w=stride[1],
        pad_policy=PadPolicy(args.pad),
    )
    patches = tile(source, spec)
    save_patches(patches, spec, values.shape, args.out)
    print(f"wrote {len(patches)} patches to {args.out}")
    return 0


def _cmd_stitch(args) -> int:
    patches, _, shape = load_patches(args.in_path)
    result = stitch(patches, shape)
    Path(args.out).write_bytes(write_npy(result))
    print(f"wrote {args.out} shape={shape[0]}x{shape[1]}")
    return 0


def _cmd_standardize(args) -> int:
    src = Path(args.in_path)
    dst = Path(args.out)
    if src.is_dir():
        index = index_mask_files(src)
        if not index:
            raise ConfigError(f"{src} holds no .npy/.png masks")
        dst.mkdir(parents=True, exist_ok=True)
        for stem, path in index.items():
            mask = standardize(load_mask(path), passes=args.passes)
            save_mask(mask, dst / path.name)
        print(f"standardized {len(index)} masks into {dst}")
    else:
        mask = standardize(load_mask(src), passes=args.passes)
        save_mask(mask, dst)
        print(f"wrote {dst}")
    return 0


def _paired_paths(pred_dir: str, gt_dir: str) -> list[tuple[str, Path, Path]]:
    preds = index_mask_files(pred_dir)
    gts = index_mask_files(gt_dir)
    stems = sorted(set(preds) & set(gts))
    if not stems:
        raise ConfigError(f"{pred_dir} and {gt_dir} share no filename stems")
    return [(s, preds[s], gts[s]) for s in stems]


def _cmd_threshold(args) -> int:
    pairs = _paired_paths(args.pred, args.gt)
    preds = [load_probability_map(p) for _, p, _ in pairs]
    gts = [load_mask(g) for _, _, g in pairs]
    result = ods_search(
        preds,
        gts,
        grid=default_grid(args.grid_step),
        standardize_masks=not args.no_standardize,
        scoring=args.scoring,
    )
    _write_text(args.out, result.to_json())
    return 0


def _cmd_eval(args) -> int:
    split = load_split(args.split) if args.split else None
    records = evaluate_run(
        args.pred,
        args.gt,
        standardize_gt=args.standardize_gt,
        jobs=args.jobs,
        split=split,
    )
    report = make_report(
        args.config_name,
        args.test_set,
        records,
        degenerate_penalty=args.degenerate_penalty,
    )
    _write_text(args.out, emit_report([report], args.format))
    return 0


def _cmd_report(args) -> int:
    reports = []
    for path in args.in_paths:
        reports.extend(report_from_json(Path(path).read_text(encoding="utf-8")))
    by_set: dict[str, int] = {}
    for r in reports:
        by_set[r.test_set] = by_set.get(r.test_set, 0) + 1
    for test_set, count in by_set.items():
        if count >= 2:
            rank_configs(reports, test_set)
    _write_text(args.out, emit_report(reports, args.format))
    return 0


_SPARSITY_CSV_FIELDS = [
    "trial",
    "few_dice", "few_jaccard", "few_bcd", "few_modified_hausdorff",
    "many_dice", "many_jaccard", "many_bcd", "many_modified_hausdorff",
]


def _cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.experiment == "sparsity":
        result = run_sparsity_experiment(
            defaults.SPARSITY_FEW,
            defaults.SPARSITY_MANY,
            noise_pixels=args.noise_pixels,
            trials=args.trials,
            seed=args.seed,
        )
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=_SPARSITY_CSV_FIELDS,
                                lineterminator="\n")
        writer.writeheader()
        for row in result.rows_as_dicts():
            writer.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})
        _write_text(str(out_dir / "trials.csv"), buf.getvalue())
        _write_text(
            str(out_dir / "means.json"),
            json.dumps(result.means, indent=2) + "\n",
        )
        masks = sparsity_trial_masks(
            defaults.SPARSITY_FEW, defaults.SPARSITY_MANY,
            args.noise_pixels, args.seed, trial=0,
        )
        for name, mask in masks.items():
            save_mask(mask, out_dir / f"trial0_{name}.png")
        print(
            f"sparsity: mean BCD few={result.means['few_bcd']:.3f}"
            f" many={result.means['many_bcd']:.3f} over {args.trials} trials"
        )
        return 0

    pair = find_contradiction_pair(
        defaults.CONTRADICTION_GT, search_budget=args.budget, seed=args.seed
    )
    save_mask(pair.ground_truth, out_dir / "ground_truth.png")
    save_mask(pair.better_dice, out_dir / "better_dice.png")
    save_mask(pair.better_bcd, out_dir / "better_bcd.png")
    summary = {
        "candidates_tried": pair.candidates_tried,
        "better_dice": {
            "dice": pair.better_dice_result.dice,
            "bcd": pair.better_dice_result.bcd,
            "modified_hausdorff": pair.better_dice_result.modified_hausdorff,
        },
        "better_bcd": {
            "dice": pair.better_bcd_result.dice,
            "bcd": pair.better_bcd_result.bcd,
            "modified_hausdorff": pair.better_bcd_result.modified_hausdorff,
        },
    }
    _write_text(str(out_dir / "contradiction.json"),
                json.dumps(summary, indent=2) + "\n")
    print(
        "contradiction:"
        f" dice {pair.better_dice_result.dice:.4f} vs"
        f" {pair.better_bcd_result.dice:.4f},"
        f" bcd {pair.better_dice_result.bcd:.3f} vs"
        f" {pair.better_bcd_result.bcd:.3f}"
    )
    return 0


def _cmd_stats(args) -> int:
    volume = _load_volume_arg(args, attr="volume")
    samples = volume.samples.astype(np.float64)
    print(
        f"shape={volume.inline_count}x{volume.crossline_count}"
        f"x{volume.sample_count}"
    )
    print(f"samples={samples.size}")
    print(f"min={float(samples.min())!r}")
    print(f"max={float(samples.max())!r}")
    print(f"mean={float(samples.mean())!r}")
    print(f"std={volume_std(volume)!r}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------

def _add_sub(subparsers, name: str, handler, help_text: str,
             hard: dict) -> argparse.ArgumentParser:
    sub = subparsers.add_parser(name, help=help_text, description=help_text)
    sub.add_argument("--config", help="flat key = value config file")
    sub.set_defaults(func=handler, _hard=hard)
    sub.set_defaults(_sub=sub)
    return sub


def _add_volume_source_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--shape", type=_shape3,
                     help="inline,crossline,sample dims for raw binary input")
    sub.add_argument("--byte-order", choices=("little", "big"),
                     help="raw binary byte order (default little)")
    sub.add_argument("--inline-byte", type=int,
                     help="1-based trace header byte of the inline number"
                          " (default 189)")
    sub.add_argument("--crossline-byte", type=int,
                     help="1-based trace header byte of the crossline number"
                          " (default 193)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultbench",
        description="Seismic fault delineation evaluation toolkit",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = _add_sub(subparsers, "ingest", _cmd_ingest,
                   "convert a volume between SEG-Y, raw binary, and NPY",
                   hard={"byte_order": "little", "inline_byte": 189,
                         "crossline_byte": 193, "format_code": 5})
    sub.add_argument("--in", dest="in_path", required=True, help="input volume")
    sub.add_argument("--out", required=True, help="output volume path")
    sub.add_argument("--format-code", type=int, choices=(1, 5),
                     help="SEG-Y sample format for .sgy output (default 5)")
    _add_volume_source_args(sub)

    sub = _add_sub(subparsers, "normalize", _cmd_normalize,
                   "rescale volume amplitudes",
                   hard={"mode": "minmax", "byte_order": "little",
                         "inline_byte": 189, "crossline_byte": 193})
    sub.add_argument("--in", dest="in_path", required=True, help="input volume")
    sub.add_argument("--out", required=True, help="output volume path")
    sub.add_argument("--mode", choices=("minmax", "zscore"),
                     help="minmax -> [-1, 1], zscore -> zero mean unit std")
    _add_volume_source_args(sub)

    sub = _add_sub(subparsers, "tile", _cmd_tile,
                   "cut a section into overlapping patches",
                   hard={"pad": "reflect", "axis": "inline"})
    sub.add_argument("--in", dest="in_path", required=True,
                     help="2-D .npy section, or 3-D .npy volume with --index")
    sub.add_argument("--out", required=True, help="output patch directory")
    sub.add_argument("--window", type=_int_pair, required=True,
                     help="window size: N or H,W")
    sub.add_argument("--stride", type=_int_pair,
                     help="stride: N or H,W (default: the window)")
    sub.add_argument("--pad", choices=[p.value for p in PadPolicy],
                     help="edge policy (default reflect = clamp last window)")
    sub.add_argument("--axis", choices=[a.value for a in Axis],
                     help="section axis when tiling a volume (default inline)")
    sub.add_argument("--index", type=int,
                     help="section index when tiling a volume")

    sub = _add_sub(subparsers, "stitch", _cmd_stitch,
                   "average a patch directory back into a full map", hard={})
    sub.add_argument("--in", dest="in_path", required=True,
                     help="patch directory written by tile")
    sub.add_argument("--out", required=True, help="output .npy map")

    sub = _add_sub(subparsers, "standardize", _cmd_standardize,
                   "thin masks to centerlines and re-dilate to uniform width",
                   hard={"passes": 1})
    sub.add_argument("--in", dest="in_path", required=True,
                     help="mask file or directory of masks")
    sub.add_argument("--out", required=True,
                     help="output file or directory")
    sub.add_argument("--passes", type=int, help="dilation passes (default 1)")

    sub = _add_sub(subparsers, "threshold", _cmd_threshold,
                   "pick the dataset-optimal binarization threshold",
                   hard={"grid_step": 0.01, "no_standardize": False,
                         "scoring": "micro"})
    sub.add_argument("--pred", required=True,
                     help="directory of probability maps (.npy/.png)")
    sub.add_argument("--gt", required=True,
                     help="directory of ground-truth masks")
    sub.add_argument("--grid-step", type=float,
                     help="threshold grid step (default 0.01)")
    sub.add_argument("--no-standardize", action="store_true", default=None,
                     help="score raw binarized masks without width"
                          " standardization")
    sub.add_argument("--scoring", choices=("micro", "macro"),
                     help="dataset Dice pooling (default micro)")
    sub.add_argument("--out", help="output JSON path (default stdout)")

    sub = _add_sub(subparsers, "eval", _cmd_eval,
                   "score predicted masks against ground truth",
                   hard={"format": "json", "standardize_gt": False,
                         "config_name": "run", "test_set": "custom",
                         "jobs": 1, "degenerate_penalty": False})
    sub.add_argument("--pred", required=True, help="predicted mask directory")
    sub.add_argument("--gt", required=True, help="ground-truth mask directory")
    sub.add_argument("--format", choices=("json", "csv", "md"),
                     help="output format (default json)")
    sub.add_argument("--out", help="output path (default stdout)")
    sub.add_argument("--standardize-gt", action="store_true", default=None,
                     help="width-standardize ground-truth masks before scoring")
    sub.add_argument("--config-name", help="configuration label (default run)")
    sub.add_argument("--test-set", help="test set label (default custom)")
    sub.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    sub.add_argument("--degenerate-penalty", action="store_true", default=None,
                     help="score empty-mask pairs with the image diagonal"
                          " instead of excluding them")
    sub.add_argument("--split",
                     help="cracks | thebe | faultseg3d | custom:<json>;"
                          " keeps only test-split section indices")

    sub = _add_sub(subparsers, "simulate", _cmd_simulate,
                   "run the synthetic metric-robustness experiments",
                   hard={"experiment": "sparsity",
                         "trials": defaults.SPARSITY_TRIALS,
                         "noise_pixels": defaults.SPARSITY_NOISE_PIXELS,
                         "seed": defaults.SPARSITY_SEED,
                         "budget": defaults.CONTRADICTION_BUDGET})
    sub.add_argument("--experiment", choices=("sparsity", "contradiction"),
                     help="which experiment (default sparsity)")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--trials", type=int,
                     help=f"sparsity trials (default {defaults.SPARSITY_TRIALS})")
    sub.add_argument("--noise-pixels", type=int,
                     help="salt noise pixels per mask"
                          f" (default {defaults.SPARSITY_NOISE_PIXELS})")
    sub.add_argument("--seed", type=int, help="experiment seed (default 0)")
    sub.add_argument("--budget", type=int,
                     help="contradiction search budget"
                          f" (default {defaults.CONTRADICTION_BUDGET})")

    sub = _add_sub(subparsers, "report", _cmd_report,
                   "merge eval JSON reports, rank configs, emit a table",
                   hard={"format": "md"})
    sub.add_argument("--in", dest="in_paths", required=True, nargs="+",
                     help="one or more eval --format json outputs")
    sub.add_argument("--format", choices=("json", "csv", "md"),
                     help="output format (default md)")
    sub.add_argument("--out", help="output path (default stdout)")

    sub = _add_sub(subparsers, "stats", _cmd_stats,
                   "print basic volume statistics",
                   hard={"byte_order": "little", "inline_byte": 189,
                         "crossline_byte": 193})
    sub.add_argument("--volume", required=True, help="volume path")
    _add_volume_source_args(sub)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _merge_config(args)
        return int(args.func(args) or 0)
    except FaultBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
