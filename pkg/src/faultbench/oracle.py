"""Brute-force reference metrics, used only to validate the fast path.

Everything here works on explicit coordinate lists with all-pairs
distance tables. That is O(n*m) per pair and gets slow past small
images, which is the point: a second, structurally unrelated route to
the same numbers. Production code must import :mod:`faultbench.metrics`
instead.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, EmptyMask
from .types import as_grid


def _coord_set(grid: np.ndarray) -> set[tuple[int, int]]:
    return {(int(r), int(c)) for r, c in np.argwhere(grid)}


def _pair(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p = as_grid(pred)
    g = as_grid(gt)
    if p.shape != g.shape:
        raise DimensionMismatch(f"pred {p.shape} vs gt {g.shape}")
    return p, g


def dice_reference(pred, gt) -> float:
    p, g = _pair(pred, gt)
    ps, gs = _coord_set(p), _coord_set(g)
    if not ps and not gs:
        return 1.0
    return 2.0 * len(ps & gs) / (len(ps) + len(gs))


def jaccard_reference(pred, gt) -> float:
    p, g = _pair(pred, gt)
    ps, gs = _coord_set(p), _coord_set(g)
    if not ps and not gs:
        return 1.0
    return len(ps & gs) / len(ps | gs)


def _all_pairs_sq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer squared distances between two (n, 2) coordinate lists."""
    diff = a[:, None, :].astype(np.int64) - b[None, :, :].astype(np.int64)
    return (diff * diff).sum(axis=2)


def _directed(a_grid: np.ndarray, b_grid: np.ndarray) -> tuple[float, float]:
    a = np.argwhere(a_grid)
    b = np.argwhere(b_grid)
    if len(a) == 0 or len(b) == 0:
        raise EmptyMask("directed distance from or to an empty mask")
    nearest_sq = _all_pairs_sq(a, b).min(axis=1).astype(np.float64)
    return float(np.sqrt(nearest_sq).mean()), float(nearest_sq.mean())


def modified_hausdorff_reference(pred, gt) -> float:
    p, g = _pair(pred, gt)
    fwd, _ = _directed(p, g)
    bwd, _ = _directed(g, p)
    return max(fwd, bwd)


def bcd_reference(pred, gt) -> float:
    p, g = _pair(pred, gt)
    _, fwd_sq = _directed(p, g)
    _, bwd_sq = _directed(g, p)
    return fwd_sq + bwd_sq


def distance_transform_reference(mask) -> np.ndarray:
    """All-pairs exact distance map: min over foreground per pixel."""
    grid = as_grid(mask)
    fg = np.argwhere(grid)
    if len(fg) == 0:
        raise EmptyMask("distance transform of an empty mask is undefined")
    h, w = grid.shape
    pixels = np.indices((h, w)).reshape(2, -1).T
    sq = _all_pairs_sq(pixels, fg).min(axis=1).astype(np.float64)
    return np.sqrt(sq).reshape(h, w)
