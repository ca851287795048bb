"""Overlap and boundary metrics for fault masks.

Overlap: Dice 2|P∩G|/(|P|+|G|) and Jaccard |P∩G|/|P∪G|, with the
both-empty convention of a perfect 1.0.

Boundary: the modified Hausdorff distance is the larger of the two mean
nearest-neighbor distances between the foreground point sets (pixels);
the balanced chamfer distance (BCD) is the *sum* of the two mean
*squared* nearest-neighbor distances, so it is reported in squared
pixels and punishes stray outliers quadratically.

Distance lookups use an exact Euclidean distance transform: nearest
foreground indices give integer squared distances, so no floating-point
sqrt/round-trip error contaminates BCD.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, EmptyMask
from .types import FaultMask, as_grid


class Degeneracy(Enum):
    NONE = "none"
    BOTH_EMPTY = "both_empty"
    PRED_EMPTY = "pred_empty"
    GT_EMPTY = "gt_empty"


@dataclass(frozen=True)
class MetricResult:
    """One prediction/ground-truth comparison.

    ``bcd`` (squared pixels) and ``modified_hausdorff`` (pixels) are
    populated only when both masks have foreground; otherwise they are
    None and ``degenerate`` says which side was empty. Dice and Jaccard
    are always populated (both-empty counts as 1.0).
    """

    dice: float
    jaccard: float
    bcd: float | None
    modified_hausdorff: float | None
    degenerate: Degeneracy = Degeneracy.NONE

    def is_degenerate(self) -> bool:
        return self.degenerate is not Degeneracy.NONE


def _pair(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p = as_grid(pred)
    g = as_grid(gt)
    if p.shape != g.shape:
        raise DimensionMismatch(f"pred {p.shape} vs gt {g.shape}")
    return p, g


def dice(pred, gt) -> float:
    """Dice overlap; 1.0 when both masks are empty."""
    p, g = _pair(pred, gt)
    size = int(p.sum()) + int(g.sum())
    if size == 0:
        return 1.0
    inter = int((p & g).sum())
    return 2.0 * inter / size


def jaccard(pred, gt) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    p, g = _pair(pred, gt)
    union = int((p | g).sum())
    if union == 0:
        return 1.0
    inter = int((p & g).sum())
    return inter / union


def _squared_edt(grid: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distance to the nearest foreground pixel.

    Returned as int64: the nearest-foreground *indices* from the exact
    EDT give integer squared distances directly.
    """
    nearest = ndimage.distance_transform_edt(
        ~grid, return_distances=False, return_indices=True
    )
    rows, cols = np.indices(grid.shape)
    dr = nearest[0].astype(np.int64) - rows
    dc = nearest[1].astype(np.int64) - cols
    return dr * dr + dc * dc


def distance_transform(mask) -> np.ndarray:
    """Exact Euclidean distance (float64) to the nearest foreground pixel."""
    grid = as_grid(mask)
    if not grid.any():
        raise EmptyMask("distance transform of an empty mask is undefined")
    return np.sqrt(_squared_edt(grid).astype(np.float64))


def _directed_means(src: np.ndarray, dst_sq_edt: np.ndarray) -> tuple[float, float]:
    """Mean and mean-squared nearest-neighbor distance from src pixels."""
    sq = dst_sq_edt[src].astype(np.float64)
    return float(np.sqrt(sq).mean()), float(sq.mean())


def modified_hausdorff(pred, gt) -> float:
    """max(mean nearest distance P->G, mean nearest distance G->P), pixels."""
    p, g = _pair(pred, gt)
    if not p.any():
        raise EmptyMask("prediction mask has no foreground")
    if not g.any():
        raise EmptyMask("ground-truth mask has no foreground")
    fwd, _ = _directed_means(p, _squared_edt(g))
    bwd, _ = _directed_means(g, _squared_edt(p))
    return max(fwd, bwd)


def bcd(pred, gt) -> float:
    """Balanced chamfer distance: sum of the two mean squared directed
    nearest-neighbor distances, in squared pixels."""
    p, g = _pair(pred, gt)
    if not p.any():
        raise EmptyMask("prediction mask has no foreground")
    if not g.any():
        raise EmptyMask("ground-truth mask has no foreground")
    _, fwd_sq = _directed_means(p, _squared_edt(g))
    _, bwd_sq = _directed_means(g, _squared_edt(p))
    return fwd_sq + bwd_sq


def evaluate_pair(pred, gt) -> MetricResult:
    """All four metrics for one mask pair, flagging empty-mask cases."""
    p, g = _pair(pred, gt)
    p_any = bool(p.any())
    g_any = bool(g.any())
    if p_any and g_any:
        degenerate = Degeneracy.NONE
    elif not p_any and not g_any:
        degenerate = Degeneracy.BOTH_EMPTY
    elif not p_any:
        degenerate = Degeneracy.PRED_EMPTY
    else:
        degenerate = Degeneracy.GT_EMPTY

    d = dice(p, g)
    j = jaccard(p, g)
    if degenerate is Degeneracy.NONE:
        g_sq = _squared_edt(g)
        p_sq = _squared_edt(p)
        fwd, fwd_sq = _directed_means(p, g_sq)
        bwd, bwd_sq = _directed_means(g, p_sq)
        return MetricResult(
            dice=d,
            jaccard=j,
            bcd=fwd_sq + bwd_sq,
            modified_hausdorff=max(fwd, bwd),
            degenerate=degenerate,
        )
    return MetricResult(
        dice=d, jaccard=j, bcd=None, modified_hausdorff=None, degenerate=degenerate
    )


__all__ = [
    "Degeneracy",
    "MetricResult",
    "FaultMask",
    "dice",
    "jaccard",
    "modified_hausdorff",
    "bcd",
    "evaluate_pair",
    "distance_transform",
]
