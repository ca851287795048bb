"""Benchmark assembly: pairing, aggregation, ranking, and report output.

A run compares a directory of predicted masks against a directory of
ground-truth masks, matching files by stem. Aggregates are quoted as
mean±std (population std, three decimals). Configurations competing on
one test set are ranked by a two-of-three rule over mean Dice (higher
wins), mean BCD, and mean modified Hausdorff (lower wins).
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AllDegenerate,
    ConfigError,
    FaultBenchError,
    InsufficientConfigs,
    NoPairsFound,
)
from .metrics import Degeneracy, MetricResult, evaluate_pair
from .morph import standardize
from .volume_io import load_mask

logger = logging.getLogger(__name__)

METRIC_FIELDS = ("dice", "jaccard", "bcd", "modified_hausdorff")
_MASK_SUFFIXES = (".npy", ".png")


class Rank(Enum):
    BEST = "best"
    SECOND = "second"
    WORST = "worst"
    UNRANKED = "unranked"


@dataclass(frozen=True)
class SplitSpec:
    """Named train/test partition over section indices."""

    name: str
    train: tuple[int, ...]
    test: tuple[int, ...]

    def __post_init__(self) -> None:
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise ValueError(f"split {self.name!r}: train/test overlap {sorted(overlap)[:5]}")
        if not self.test:
            raise ValueError(f"split {self.name!r} has an empty test set")


def _cracks_split() -> SplitSpec:
    # Test slices are the volume's two faces: first 30 and last 30 of 400.
    test = tuple(range(0, 30)) + tuple(range(370, 400))
    train = tuple(i for i in range(400) if i not in set(test))
    return SplitSpec("cracks", train, test)


SPLIT_PRESETS = {
    "cracks": _cracks_split(),
    "thebe": SplitSpec("thebe", tuple(range(0, 400)), tuple(range(400, 500))),
    "faultseg3d": SplitSpec("faultseg3d", tuple(range(0, 200)), tuple(range(200, 220))),
}


def load_split(spec: str) -> SplitSpec:
    """Resolve a preset name or ``custom:<json-file>`` into a SplitSpec."""
    if spec in SPLIT_PRESETS:
        return SPLIT_PRESETS[spec]
    if spec.startswith("custom:"):
        path = Path(spec[len("custom:"):])
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return SplitSpec(
                name=str(data.get("name", path.stem)),
                train=tuple(int(i) for i in data["train"]),
                test=tuple(int(i) for i in data["test"]),
            )
        except (OSError, KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"cannot load split file {path}: {exc}") from exc
    raise ConfigError(
        f"unknown split {spec!r}; presets: {sorted(SPLIT_PRESETS)} or custom:<file>"
    )


@dataclass(frozen=True)
class EvalRecord:
    """One prediction/ground-truth pairing within a run."""

    section_id: str
    result: MetricResult | None
    shape: tuple[int, int] | None = None
    error: str | None = None


@dataclass(frozen=True)
class Aggregate:
    """mean±std summary of one metric over the scorable records."""

    mean: float
    std: float
    count: int
    degenerate_count: int

    @property
    def formatted(self) -> str:
        return format_mean_std(self.mean, self.std)


@dataclass
class BenchReport:
    """Everything known about one configuration on one test set."""

    config_name: str
    test_set: str
    records: list[EvalRecord]
    aggregates: dict[str, Aggregate]
    rank: Rank = Rank.UNRANKED


def format_mean_std(mean: float, std: float, decimals: int = 3) -> str:
    return f"{mean:.{decimals}f}±{std:.{decimals}f}"


# ---------------------------------------------------------------------------
# Run evaluation
# ---------------------------------------------------------------------------

def index_mask_files(directory) -> dict[str, Path]:
    """Map filename stem -> path for the .npy/.png files in a directory.

    When a stem exists in both formats the .npy file wins.
    """
    index: dict[str, Path] = {}
    for path in sorted(Path(directory).iterdir()):
        if path.suffix.lower() in _MASK_SUFFIXES and path.is_file():
            if path.stem not in index or path.suffix.lower() == ".npy":
                index[path.stem] = path
    return index


def _evaluate_one(stem: str, pred_path: Path, gt_path: Path,
                  standardize_gt: bool) -> EvalRecord:
    try:
        pred = load_mask(pred_path)
        gt = load_mask(gt_path)
        if standardize_gt:
            gt = standardize(gt)
        result = evaluate_pair(pred, gt)
        return EvalRecord(stem, result, shape=(gt.height, gt.width))
    except FaultBenchError as exc:
        return EvalRecord(stem, None, error=f"{type(exc).__name__}: {exc}")


def _stem_index(stem: str) -> int | None:
    digits = ""
    for ch in reversed(stem):
        if ch.isdigit():
            digits = ch + digits
        else:
            break
    return int(digits) if digits else None


def evaluate_run(
    pred_dir,
    gt_dir,
    standardize_gt: bool = False,
    jobs: int = 1,
    split: SplitSpec | None = None,
) -> list[EvalRecord]:
    """Score every prediction whose filename stem has a ground truth.

    Files may be .npy (bool/uint8) or .png masks. Stems present on only
    one side are logged and skipped; zero common stems raises
    NoPairsFound. Per-pair failures (shape mismatch, bad file) become
    error records instead of aborting the run. With a split, only stems
    whose trailing integer is in the split's test set are scored.
    """
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    if not pred_dir.is_dir():
        raise NoPairsFound(f"prediction directory {pred_dir} does not exist")
    if not gt_dir.is_dir():
        raise NoPairsFound(f"ground-truth directory {gt_dir} does not exist")
    preds = index_mask_files(pred_dir)
    gts = index_mask_files(gt_dir)
    stems = sorted(set(preds) & set(gts))
    for stem in sorted(set(preds) ^ set(gts)):
        side = "ground truth" if stem in preds else "prediction"
        logger.warning("no %s for %r; skipped", side, stem)
    if split is not None:
        wanted = set(split.test)
        kept = [s for s in stems if _stem_index(s) in wanted]
        for stem in sorted(set(stems) - set(kept)):
            logger.warning("%r outside the %s test split; skipped", stem, split.name)
        stems = kept
    if not stems:
        raise NoPairsFound(
            f"{pred_dir} and {gt_dir} share no scorable .npy/.png filename stems"
        )
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(
                pool.map(
                    lambda s: _evaluate_one(s, preds[s], gts[s], standardize_gt),
                    stems,
                )
            )
    return [_evaluate_one(s, preds[s], gts[s], standardize_gt) for s in stems]


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def aggregate(records: Sequence[EvalRecord],
              degenerate_penalty: bool = False) -> dict[str, Aggregate]:
    """Summarize records per metric as population mean/std.

    Dice and Jaccard cover every scored record (empty-mask conventions
    are already in the values). Distance metrics exclude degenerate
    records and count them, unless ``degenerate_penalty`` substitutes
    the image diagonal (squared for BCD) so totals stay comparable.
    Raises AllDegenerate when a distance metric has nothing to average.
    """
    scored = [r for r in records if r.result is not None and r.error is None]
    if not scored:
        raise AllDegenerate("no scorable records to aggregate")

    out: dict[str, Aggregate] = {}
    for name in ("dice", "jaccard"):
        vals = [getattr(r.result, name) for r in scored]
        deg = sum(1 for r in scored if r.result.is_degenerate())
        out[name] = Aggregate(
            mean=float(np.mean(vals)),
            std=float(np.std(vals)),
            count=len(vals),
            degenerate_count=deg,
        )
    for name in ("bcd", "modified_hausdorff"):
        vals: list[float] = []
        deg = 0
        for r in scored:
            value = getattr(r.result, name)
            if value is not None:
                vals.append(value)
                continue
            deg += 1
            if degenerate_penalty:
                if r.shape is None:
                    raise AllDegenerate(
                        f"record {r.section_id!r} lacks a shape for the penalty"
                    )
                diagonal = math.hypot(*r.shape)
                vals.append(diagonal * diagonal if name == "bcd" else diagonal)
        if not vals:
            raise AllDegenerate(f"every record is degenerate for {name}")
        out[name] = Aggregate(
            mean=float(np.mean(vals)),
            std=float(np.std(vals)),
            count=len(vals),
            degenerate_count=deg,
        )
    return out


def make_report(config_name: str, test_set: str, records: list[EvalRecord],
                degenerate_penalty: bool = False) -> BenchReport:
    return BenchReport(
        config_name=config_name,
        test_set=test_set,
        records=records,
        aggregates=aggregate(records, degenerate_penalty=degenerate_penalty),
    )


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------

# (metric, higher_is_better)
_RANK_METRICS = (("dice", True), ("bcd", False), ("modified_hausdorff", False))


def _tier_sets(values: list[float], higher_better: bool):
    distinct = sorted(set(values), reverse=higher_better)
    best = {i for i, v in enumerate(values) if v == distinct[0]}
    worst = {i for i, v in enumerate(values) if v == distinct[-1]}
    second: set[int] = set()
    if len(distinct) >= 2:
        second = {i for i, v in enumerate(values) if v == distinct[1]}
    return best, second, worst


def rank_configs(reports: Sequence[BenchReport], test_set: str) -> list[BenchReport]:
    """Assign Best/Second/Worst among the reports for one test set.

    A config earns a tier by winning it under at least two of the three
    metrics (mean Dice high, mean BCD low, mean Hausdorff low); ties
    share votes. When several configs qualify for a tier, higher mean
    Dice wins it (lower for Worst). A config takes at most one tier and
    anything left over is Unranked. Returns the ranked reports.
    """
    group = [r for r in reports if r.test_set == test_set]
    if len(group) < 2:
        raise InsufficientConfigs(
            f"ranking needs >= 2 configs on {test_set!r}, got {len(group)}"
        )
    votes = {tier: [0] * len(group) for tier in (Rank.BEST, Rank.SECOND, Rank.WORST)}
    for metric, higher_better in _RANK_METRICS:
        values = [r.aggregates[metric].mean for r in group]
        best, second, worst = _tier_sets(values, higher_better)
        for i in best:
            votes[Rank.BEST][i] += 1
        for i in second:
            votes[Rank.SECOND][i] += 1
        for i in worst:
            votes[Rank.WORST][i] += 1

    for r in group:
        r.rank = Rank.UNRANKED
    taken: set[int] = set()
    for tier in (Rank.BEST, Rank.SECOND, Rank.WORST):
        qualified = [i for i in range(len(group))
                     if votes[tier][i] >= 2 and i not in taken]
        if tier is Rank.SECOND:
            # With two distinct values a metric's runner-up IS its last
            # place, so second/worst votes overlap. A config voted last
            # at least as often as second belongs at the bottom.
            qualified = [i for i in qualified
                         if votes[Rank.SECOND][i] > votes[Rank.WORST][i]]
        if not qualified:
            continue
        # Overall ties break on mean Dice: highest claims Best/Second,
        # lowest claims Worst; config name keeps it deterministic.
        reverse = tier is not Rank.WORST
        qualified.sort(
            key=lambda i: (
                -group[i].aggregates["dice"].mean if reverse
                else group[i].aggregates["dice"].mean,
                group[i].config_name,
            )
        )
        winner = qualified[0]
        group[winner].rank = tier
        taken.add(winner)
    return group


# ---------------------------------------------------------------------------
# Report emission
# ---------------------------------------------------------------------------

def emit_report(reports: Sequence[BenchReport], fmt: str = "json") -> str:
    """Render reports as "json" (lossless), "csv" (one row per
    config/section), or "md" (benchmark grid of mean±std cells)."""
    if fmt == "json":
        return _emit_json(reports)
    if fmt == "csv":
        return _emit_csv(reports)
    if fmt == "md":
        return _emit_markdown(reports)
    raise ConfigError(f"unknown report format {fmt!r}; use json, csv, or md")


def _emit_json(reports: Sequence[BenchReport]) -> str:
    payload = {"reports": []}
    for r in reports:
        rows = []
        for rec in r.records:
            row = {
                "section_id": rec.section_id,
                "shape": list(rec.shape) if rec.shape else None,
                "error": rec.error,
            }
            if rec.result is not None:
                row.update(
                    dice=rec.result.dice,
                    jaccard=rec.result.jaccard,
                    bcd=rec.result.bcd,
                    modified_hausdorff=rec.result.modified_hausdorff,
                    degenerate=rec.result.degenerate.value,
                )
            rows.append(row)
        payload["reports"].append(
            {
                "config_name": r.config_name,
                "test_set": r.test_set,
                "rank": r.rank.value,
                "records": rows,
                "aggregates": {
                    name: {
                        "mean": agg.mean,
                        "std": agg.std,
                        "count": agg.count,
                        "degenerate_count": agg.degenerate_count,
                        "formatted": agg.formatted,
                    }
                    for name, agg in r.aggregates.items()
                },
            }
        )
    return json.dumps(payload, indent=2) + "\n"


def report_from_json(text: str) -> list[BenchReport]:
    """Inverse of the JSON emitter; floats survive bit for bit."""
    payload = json.loads(text)
    reports = []
    for item in payload["reports"]:
        records = []
        for row in item["records"]:
            result = None
            if "dice" in row:
                result = MetricResult(
                    dice=row["dice"],
                    jaccard=row["jaccard"],
                    bcd=row["bcd"],
                    modified_hausdorff=row["modified_hausdorff"],
                    degenerate=Degeneracy(row["degenerate"]),
                )
            records.append(
                EvalRecord(
                    section_id=row["section_id"],
                    result=result,
                    shape=tuple(row["shape"]) if row.get("shape") else None,
                    error=row.get("error"),
                )
            )
        aggregates = {
            name: Aggregate(
                mean=agg["mean"],
                std=agg["std"],
                count=agg["count"],
                degenerate_count=agg["degenerate_count"],
            )
            for name, agg in item["aggregates"].items()
        }
        reports.append(
            BenchReport(
                config_name=item["config_name"],
                test_set=item["test_set"],
                records=records,
                aggregates=aggregates,
                rank=Rank(item["rank"]),
            )
        )
    return reports


_CSV_HEADER = [
    "config_name", "test_set", "section_id",
    "dice", "jaccard", "bcd", "modified_hausdorff", "degenerate", "error",
]


def _emit_csv(reports: Sequence[BenchReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_HEADER)
    for r in reports:
        for rec in r.records:
            if rec.result is not None:
                res = rec.result
                row = [
                    r.config_name, r.test_set, rec.section_id,
                    repr(res.dice), repr(res.jaccard),
                    "" if res.bcd is None else repr(res.bcd),
                    "" if res.modified_hausdorff is None
                    else repr(res.modified_hausdorff),
                    res.degenerate.value, rec.error or "",
                ]
            else:
                row = [r.config_name, r.test_set, rec.section_id,
                       "", "", "", "", "", rec.error or ""]
            writer.writerow(row)
    return buf.getvalue()


def _emit_markdown(reports: Sequence[BenchReport]) -> str:
    lines: list[str] = ["# Benchmark results", ""]
    by_set: dict[str, list[BenchReport]] = {}
    for r in reports:
        by_set.setdefault(r.test_set, []).append(r)
    for test_set in sorted(by_set):
        group = by_set[test_set]
        lines.append(f"## Test on {test_set}")
        lines.append("")
        lines.append("| Configuration | Dice | BCD | Hausdorff | Rank |")
        lines.append("| --- | --- | --- | --- | --- |")
        for r in group:
            cells = [
                r.config_name,
                r.aggregates["dice"].formatted,
                r.aggregates["bcd"].formatted,
                r.aggregates["modified_hausdorff"].formatted,
                r.rank.value,
            ]
            lines.append("| " + " | ".join(cells) + " |")
        lines.append("")
    return "\n".join(lines)
