"""Volume normalization, section extraction, and patch tiling.

Sections are 2-D views of a volume with rows = sample (depth) axis and
columns = the lateral axis, matching how fault images are displayed.
Tiling slides a fixed window over a section on a stride grid; stitching
averages overlapping patch predictions back into a full-size map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConfigError,
    ConstantVolume,
    CoverageGap,
    IndexOutOfRange,
    SizeMismatch,
    WindowLargerThanSection,
    ZeroVariance,
)
from .types import ProbabilityMap, SeismicVolume
from .volume_io import write_npy


class Axis(Enum):
    INLINE = "inline"
    CROSSLINE = "crossline"


class PadPolicy(Enum):
    # Reflect keeps real samples only: the last window per axis is
    # clamped so it ends exactly at the section border (overlap grows).
    REFLECT = "reflect"
    ZERO_PAD = "zeropad"
    DROP_PARTIAL = "droppartial"


@dataclass(frozen=True)
class Section:
    """A 2-D slice of a volume: rows are depth samples, columns lateral."""

    values: np.ndarray
    axis: Axis
    index: int

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"section must be 2-D, got {arr.ndim}-D")
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class TilingSpec:
    """Window and stride geometry for tiling a section."""

    window_h: int
    window_w: int
    stride_h: int
    stride_w: int
    pad_policy: PadPolicy = PadPolicy.REFLECT

    def __post_init__(self) -> None:
        for stride, window, name in (
            (self.stride_h, self.window_h, "vertical"),
            (self.stride_w, self.window_w, "horizontal"),
        ):
            if window < 1:
                raise ValueError(f"{name} window must be >= 1, got {window}")
            if not 1 <= stride <= window:
                raise ValueError(
                    f"{name} stride must satisfy 1 <= stride <= window,"
                    f" got stride={stride} window={window}"
                )

    @classmethod
    def square(cls, window: int, stride: int | None = None,
               pad_policy: PadPolicy = PadPolicy.REFLECT) -> "TilingSpec":
        s = window if stride is None else stride
        return cls(window, window, s, s, pad_policy)


@dataclass(frozen=True)
class Patch:
    """A window copied out of a section, with its origin in section pixels."""

    values: np.ndarray
    origin_row: int
    origin_col: int
    section_ref: tuple[str, int] | None = None

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.values)
        if arr.ndim != 2:
            raise ValueError(f"patch must be 2-D, got {arr.ndim}-D")
        if self.origin_row < 0 or self.origin_col < 0:
            raise ValueError("patch origin must be non-negative")
        object.__setattr__(self, "values", arr)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize_minmax(volume: SeismicVolume) -> SeismicVolume:
    """Rescale amplitudes linearly so the volume spans exactly [-1, 1].

    Uses the global minimum and maximum over all samples; a flat volume
    has no scale and raises ConstantVolume.
    """
    samples = volume.samples.astype(np.float64)
    lo = samples.min()
    hi = samples.max()
    if hi == lo:
        raise ConstantVolume(f"all samples equal {lo}; min-max scale undefined")
    out = 2.0 * (samples - lo) / (hi - lo) - 1.0
    return replace(volume, samples=out.astype(np.float32))


def normalize_zscore(volume: SeismicVolume) -> SeismicVolume:
    """Center on the global mean and divide by the population std."""
    samples = volume.samples.astype(np.float64)
    mean = samples.mean()
    std = samples.std()
    if std == 0.0:
        raise ZeroVariance("volume variance is zero; z-score undefined")
    out = (samples - mean) / std
    return replace(volume, samples=out.astype(np.float32))


def volume_std(volume: SeismicVolume) -> float:
    """Population standard deviation over every sample in the volume."""
    return float(volume.samples.astype(np.float64).std())


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

def extract_section(volume: SeismicVolume, axis: Axis, index: int) -> Section:
    """Cut one 2-D section: rows = sample axis, columns = lateral axis."""
    if axis is Axis.INLINE:
        extent = volume.inline_count
        if not 0 <= index < extent:
            raise IndexOutOfRange(f"inline {index} outside [0, {extent})")
        plane = volume.samples[index, :, :].T  # (sample, crossline)
    else:
        extent = volume.crossline_count
        if not 0 <= index < extent:
            raise IndexOutOfRange(f"crossline {index} outside [0, {extent})")
        plane = volume.samples[:, index, :].T  # (sample, inline)
    return Section(plane.copy(), axis=axis, index=index)


# ---------------------------------------------------------------------------
# Tiling and stitching
# ---------------------------------------------------------------------------

def _axis_origins(extent: int, window: int, stride: int,
                  policy: PadPolicy) -> list[int]:
    if window > extent:
        if policy is PadPolicy.ZERO_PAD:
            return [0]
        raise WindowLargerThanSection(
            f"window {window} exceeds section extent {extent}"
        )
    origins = list(range(0, extent - window + 1, stride))
    covered = origins[-1] + window
    if covered < extent:
        if policy is PadPolicy.REFLECT:
            origins.append(extent - window)  # clamp the last window to the border
        elif policy is PadPolicy.ZERO_PAD:
            origins.append(origins[-1] + stride)
        # DROP_PARTIAL leaves the remainder uncovered.
    return origins


def tile(section: Section | np.ndarray, spec: TilingSpec) -> list[Patch]:
    """Cut a section into window-sized patches in row-major origin order."""
    if isinstance(section, Section):
        values = section.values
        ref = (section.axis.value, section.index)
    else:
        values = np.ascontiguousarray(section)
        if values.ndim != 2:
            raise ValueError(f"section array must be 2-D, got {values.ndim}-D")
        ref = None
    h, w = values.shape
    rows = _axis_origins(h, spec.window_h, spec.stride_h, spec.pad_policy)
    cols = _axis_origins(w, spec.window_w, spec.stride_w, spec.pad_policy)

    if spec.pad_policy is PadPolicy.ZERO_PAD:
        need_h = max(r + spec.window_h for r in rows)
        need_w = max(c + spec.window_w for c in cols)
        if need_h > h or need_w > w:
            values = np.pad(values, ((0, need_h - h), (0, need_w - w)))

    patches = []
    for r in rows:
        for c in cols:
            window = values[r:r + spec.window_h, c:c + spec.window_w]
            patches.append(Patch(window.copy(), r, c, ref))
    return patches


def stitch(patches: Iterable[Patch], shape: tuple[int, int]) -> ProbabilityMap:
    """Average patch values back onto a (height, width) canvas.

    Pixels past the canvas border (zero-pad tiling) are discarded;
    pixels covered by no patch raise CoverageGap.
    """
    h, w = shape
    total = np.zeros((h, w), dtype=np.float64)
    cover = np.zeros((h, w), dtype=np.int64)
    for patch in patches:
        ph, pw = patch.values.shape
        r0, c0 = patch.origin_row, patch.origin_col
        r1, c1 = min(r0 + ph, h), min(c0 + pw, w)
        if r0 >= h or c0 >= w:
            continue
        total[r0:r1, c0:c1] += patch.values[: r1 - r0, : c1 - c0]
        cover[r0:r1, c0:c1] += 1
    if (cover == 0).any():
        gaps = int((cover == 0).sum())
        raise CoverageGap(f"{gaps} pixels covered by no patch")
    return ProbabilityMap(total / cover)


# ---------------------------------------------------------------------------
# Patch-set serialization: one NPY stack plus a JSON sidecar
# ---------------------------------------------------------------------------

_STACK_NAME = "patches.npy"
_SIDECAR_NAME = "tiling.json"


def save_patches(patches: Sequence[Patch], spec: TilingSpec,
                 shape: tuple[int, int], directory) -> None:
    """Write a patch set as patches.npy plus a tiling.json sidecar."""
    if not patches:
        raise SizeMismatch("cannot save an empty patch set")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stack = np.stack([p.values.astype(np.float32) for p in patches])
    (directory / _STACK_NAME).write_bytes(write_npy(stack))
    refs = {p.section_ref for p in patches}
    ref = refs.pop() if len(refs) == 1 else None
    sidecar = {
        "window": [spec.window_h, spec.window_w],
        "stride": [spec.stride_h, spec.stride_w],
        "pad_policy": spec.pad_policy.value,
        "section_shape": [int(shape[0]), int(shape[1])],
        "origins": [[p.origin_row, p.origin_col] for p in patches],
        "section_ref": list(ref) if ref else None,
    }
    (directory / _SIDECAR_NAME).write_text(
        json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
    )


def load_patches(directory) -> tuple[list[Patch], TilingSpec, tuple[int, int]]:
    """Load a patch set saved by :func:`save_patches`."""
    directory = Path(directory)
    stack_path = directory / _STACK_NAME
    sidecar_path = directory / _SIDECAR_NAME
    if not stack_path.exists() or not sidecar_path.exists():
        raise ConfigError(
            f"{directory} does not hold {_STACK_NAME} + {_SIDECAR_NAME}"
        )
    meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
    spec = TilingSpec(
        window_h=int(meta["window"][0]),
        window_w=int(meta["window"][1]),
        stride_h=int(meta["stride"][0]),
        stride_w=int(meta["stride"][1]),
        pad_policy=PadPolicy(meta["pad_policy"]),
    )
    stack = np.load(stack_path)
    if stack.ndim != 3:
        raise SizeMismatch(f"{stack_path.name} does not hold a 3-D patch stack")
    origins = meta["origins"]
    if len(origins) != stack.shape[0]:
        raise SizeMismatch(
            f"sidecar lists {len(origins)} origins, stack holds {stack.shape[0]}"
        )
    ref = tuple(meta["section_ref"]) if meta.get("section_ref") else None
    patches = [
        Patch(stack[i], int(r), int(c), ref)
        for i, (r, c) in enumerate(origins)
    ]
    shape = (int(meta["section_shape"][0]), int(meta["section_shape"][1]))
    return patches, spec, shape
