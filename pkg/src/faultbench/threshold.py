"""Optimal dataset-scale (ODS) threshold selection.

One threshold is chosen for the whole dataset: every candidate is
scored by dataset-level Dice and the best-scoring (ties: smallest)
threshold wins. Binarized predictions are width-standardized by
default so the score compares geometry rather than stroke thickness.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyDataset, LengthMismatch
from .morph import standardize
from .types import FaultMask, as_grid, as_values

DEFAULT_GRID_STEP = 0.01
SCORINGS = ("micro", "macro")


def default_grid(step: float = DEFAULT_GRID_STEP) -> list[float]:
    """Thresholds step, 2*step, ... covering (0, 1) exclusive.

    step=0.01 gives the standard 0.01 .. 0.99 sweep.
    """
    if not 0.0 < step < 1.0:
        raise ValueError(f"grid step must be in (0, 1), got {step}")
    n = int(round(1.0 / step))
    grid = [round(i * step, 12) for i in range(1, n)]
    return [t for t in grid if 0.0 < t < 1.0]


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a threshold sweep.

    ``curve`` holds (threshold, score) pairs with strictly increasing
    thresholds; ``best_score`` equals the curve maximum and
    ``best_threshold`` is the smallest argmax.
    """

    best_threshold: float
    best_score: float
    curve: tuple[tuple[float, float], ...]

    def to_dict(self) -> dict:
        return {
            "best_threshold": self.best_threshold,
            "best_score": self.best_score,
            "curve": [[t, s] for t, s in self.curve],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdResult":
        return cls(
            best_threshold=float(data["best_threshold"]),
            best_score=float(data["best_score"]),
            curve=tuple((float(t), float(s)) for t, s in data["curve"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ThresholdResult":
        return cls.from_dict(json.loads(text))


def binarize(pred, threshold: float) -> FaultMask:
    """Pixel is fault iff its score >= threshold."""
    values = as_values(pred)
    if not np.isfinite(threshold):
        raise ValueError(f"threshold must be finite, got {threshold}")
    return FaultMask(values >= threshold)


def _micro_dice(masks: list[np.ndarray], gts: list[np.ndarray]) -> float:
    inter = 0
    size = 0
    for m, g in zip(masks, gts):
        inter += int((m & g).sum())
        size += int(m.sum()) + int(g.sum())
    if size == 0:
        return 1.0
    return 2.0 * inter / size


def _macro_dice(masks: list[np.ndarray], gts: list[np.ndarray]) -> float:
    scores = []
    for m, g in zip(masks, gts):
        size = int(m.sum()) + int(g.sum())
        scores.append(1.0 if size == 0 else 2.0 * int((m & g).sum()) / size)
    return float(np.mean(scores))


def ods_search(
    preds: Sequence,
    gts: Sequence,
    grid: Sequence[float] | None = None,
    standardize_masks: bool = True,
    scoring: str = "micro",
) -> ThresholdResult:
    """Sweep thresholds over the whole dataset and pick the Dice argmax.

    ``standardize_masks`` runs width standardization on each binarized
    prediction (not on the ground truth) before scoring. ``scoring``
    is "micro" (pooled counts over all sections, the default) or
    "macro" (mean of per-section Dice). Ties prefer the smaller
    threshold.
    """
    if scoring not in SCORINGS:
        raise ValueError(f"scoring must be one of {SCORINGS}, got {scoring!r}")
    if len(preds) != len(gts):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(gts)} ground truths")
    if len(preds) == 0:
        raise EmptyDataset("threshold search needs at least one pair")
    values = [as_values(p) for p in preds]
    grids = [as_grid(g) for g in gts]
    for i, (p, g) in enumerate(zip(values, grids)):
        if p.shape != g.shape:
            raise DimensionMismatch(f"pair {i}: pred {p.shape} vs gt {g.shape}")

    if grid is None:
        thresholds = default_grid()
    else:
        if len(grid) == 0:
            raise EmptyDataset("threshold grid is empty")
        for t in grid:
            if not (np.isfinite(t) and 0.0 <= t <= 1.0):
                raise ValueError(f"grid threshold {t} outside [0, 1]")
        thresholds = sorted(set(float(t) for t in grid))

    score_fn = _micro_dice if scoring == "micro" else _macro_dice
    curve = []
    best_t = thresholds[0]
    best_s = -np.inf
    for t in thresholds:
        masks = [v >= t for v in values]
        if standardize_masks:
            masks = [standardize(m).grid for m in masks]
        s = score_fn(masks, grids)
        curve.append((t, s))
        if s > best_s:  # strict: ties keep the earlier (smaller) threshold
            best_s = s
            best_t = t
    return ThresholdResult(best_threshold=best_t, best_score=float(best_s),
                           curve=tuple(curve))


def apply_threshold(
    preds: Sequence,
    threshold: float | ThresholdResult,
    standardize_masks: bool = True,
) -> list[FaultMask]:
    """Binarize every prediction at the chosen threshold, then optionally
    width-standardize each mask (matching ods_search's scoring path)."""
    t = threshold.best_threshold if isinstance(threshold, ThresholdResult) else threshold
    masks = [binarize(p, t) for p in preds]
    if standardize_masks:
        masks = [standardize(m) for m in masks]
    return masks
