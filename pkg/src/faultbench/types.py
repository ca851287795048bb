"""Core array-carrying types shared across the toolkit.

These are thin wrappers over numpy arrays. They exist to pin down axis
order, dtype, and finiteness at module boundaries, not to hide numpy:
every wrapper exposes its array directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NonFiniteSample


class SourceFormat(Enum):
    SEGY = "segy"
    RAW = "raw"
    NPY = "npy"
    MEMORY = "memory"


@dataclass(frozen=True, eq=False)
class SeismicVolume:
    """A 3-D amplitude cube ordered (inline, crossline, sample).

    ``samples`` is float32 and C-contiguous; every axis has extent >= 1
    and every value is finite. ``sample_interval_us`` is the vertical
    sampling step in microseconds (0 when the source carries none).
    """

    samples: np.ndarray
    sample_interval_us: int = 0
    source_format: SourceFormat = field(default=SourceFormat.MEMORY, compare=False)

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.samples, dtype=np.float32)
        if arr.ndim != 3:
            raise ValueError(f"volume must be 3-D, got {arr.ndim}-D")
        if min(arr.shape) < 1:
            raise ValueError(f"every volume axis needs extent >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise NonFiniteSample("volume contains NaN or infinite samples")
        if self.sample_interval_us < 0:
            raise ValueError("sample_interval_us must be >= 0")
        object.__setattr__(self, "samples", arr)

    @property
    def inline_count(self) -> int:
        return self.samples.shape[0]

    @property
    def crossline_count(self) -> int:
        return self.samples.shape[1]

    @property
    def sample_count(self) -> int:
        return self.samples.shape[2]

    def __eq__(self, other: object) -> bool:
        # Bitwise sample equality; the source format is provenance, not identity.
        if not isinstance(other, SeismicVolume):
            return NotImplemented
        return (
            self.samples.shape == other.samples.shape
            and self.sample_interval_us == other.sample_interval_us
            and self.samples.tobytes() == other.samples.tobytes()
        )


@dataclass(frozen=True, eq=False)
class FaultMask:
    """A 2-D boolean fault map: True marks a fault pixel."""

    grid: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.grid)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got {arr.ndim}-D")
        if arr.dtype != np.bool_:
            arr = arr.astype(bool)
        object.__setattr__(self, "grid", arr)

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    @property
    def count(self) -> int:
        return int(self.grid.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FaultMask):
            return NotImplemented
        return self.grid.shape == other.grid.shape and bool(
            (self.grid == other.grid).all()
        )


@dataclass(frozen=True, eq=False)
class ProbabilityMap:
    """A 2-D float64 map of per-pixel fault scores.

    Model outputs live in [0, 1]; consumers that require the unit range
    (losses, thresholding) enforce it at their own boundary, because
    stitched amplitude sections reuse this container with wider ranges.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"probability map must be 2-D, got {arr.ndim}-D")
        if not np.isfinite(arr).all():
            raise NonFiniteSample("probability map contains NaN or infinite values")
        object.__setattr__(self, "values", arr)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProbabilityMap):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            (self.values == other.values).all()
        )


def as_grid(mask) -> np.ndarray:
    """Coerce a FaultMask or array-like into a 2-D boolean array."""
    if isinstance(mask, FaultMask):
        return mask.grid
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ValueError(f"mask must be 2-D, got {arr.ndim}-D")
    return arr.astype(bool) if arr.dtype != np.bool_ else arr


def as_values(pred) -> np.ndarray:
    """Coerce a ProbabilityMap or array-like into a 2-D float64 array."""
    if isinstance(pred, ProbabilityMap):
        return pred.values
    arr = np.asarray(pred, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"probability map must be 2-D, got {arr.ndim}-D")
    return arr
