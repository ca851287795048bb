"""Binary morphology for fault masks: thinning, dilation, standardization.

Standardization makes masks of different stroke widths comparable: thin
every stroke to its one-pixel centerline, then dilate back to a uniform
width. Annotation thickness is a labeling artifact, not geology, so
scoring standardized masks compares fault geometry instead of pen width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .types import FaultMask, as_grid


@dataclass(frozen=True)
class StructuringElement:
    """A 3x3 boolean neighborhood with the center pixel set."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.grid).astype(bool)
        if arr.shape != (3, 3):
            raise ValueError(f"structuring element must be 3x3, got {arr.shape}")
        if not arr[1, 1]:
            raise ValueError("structuring element center must be set")
        object.__setattr__(self, "grid", arr)

    def offsets(self) -> list[tuple[int, int]]:
        """Set positions as (row, col) offsets relative to the center."""
        return [(int(r) - 1, int(c) - 1) for r, c in np.argwhere(self.grid)]


SQUARE = StructuringElement(np.ones((3, 3), dtype=bool))
CROSS = StructuringElement(
    np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
)
DEFAULT_SE = SQUARE


def skeletonize(mask: FaultMask | np.ndarray) -> FaultMask:
    """Thin foreground strokes to one-pixel centerlines.

    Two-subiteration thinning (Zhang & Suen 1984): each pass deletes
    border pixels whose 8-neighborhood has 2..6 foreground pixels and
    exactly one 0->1 transition around the ring, with direction
    conditions that alternate between the passes so opposite borders
    erode symmetrically. Repeats until stable. Deletion-only, so the
    skeleton is a subset of the input, and 8-connectivity is preserved.
    """
    grid = as_grid(mask)
    # Background border lets edge-touching strokes erode; cropped after.
    img = np.pad(grid, 1).astype(np.uint8)
    while True:
        changed = False
        for step in (0, 1):
            p2 = img[:-2, 1:-1]
            p3 = img[:-2, 2:]
            p4 = img[1:-1, 2:]
            p5 = img[2:, 2:]
            p6 = img[2:, 1:-1]
            p7 = img[2:, :-2]
            p8 = img[1:-1, :-2]
            p9 = img[:-2, :-2]
            ring = (p2, p3, p4, p5, p6, p7, p8, p9)
            count = np.zeros(p2.shape, dtype=np.uint8)
            for p in ring:
                count += p
            transitions = np.zeros(p2.shape, dtype=np.uint8)
            for a, b in zip(ring, ring[1:] + ring[:1]):
                transitions += (a == 0) & (b == 1)
            if step == 0:
                direction = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
            else:
                direction = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
            core = img[1:-1, 1:-1]
            kill = (
                (core == 1)
                & (count >= 2) & (count <= 6)
                & (transitions == 1)
                & direction
            )
            if kill.any():
                core[kill] = 0
                changed = True
        if not changed:
            break
    return FaultMask(img[1:-1, 1:-1].astype(bool))


def dilate(mask: FaultMask | np.ndarray,
           se: StructuringElement = DEFAULT_SE) -> FaultMask:
    """Minkowski dilation: output is the union of the mask shifted by
    every set offset of the structuring element."""
    grid = as_grid(mask)
    h, w = grid.shape
    out = np.zeros_like(grid)
    for dr, dc in se.offsets():
        src = grid[max(-dr, 0):h - max(dr, 0), max(-dc, 0):w - max(dc, 0)]
        out[max(dr, 0):h + min(dr, 0), max(dc, 0):w + min(dc, 0)] |= src
    return FaultMask(out)


def standardize(mask: FaultMask | np.ndarray,
                se: StructuringElement = DEFAULT_SE,
                passes: int = 1) -> FaultMask:
    """Normalize stroke width: skeletonize, then dilate ``passes`` times.

    With the defaults (full 3x3 element, one pass) every stroke comes
    out three pixels wide regardless of its annotated thickness.
    """
    if passes < 0:
        raise ValueError(f"passes must be >= 0, got {passes}")
    out = skeletonize(mask)
    for _ in range(passes):
        out = dilate(out, se)
    return out


def component_count(mask: FaultMask | np.ndarray) -> int:
    """Number of 8-connected foreground components."""
    grid = as_grid(mask)
    _, n = ndimage.label(grid, structure=np.ones((3, 3), dtype=np.int32))
    return int(n)
