"""Synthetic fault masks and controlled perturbation experiments.

Faults are drawn as one-pixel polylines: a random anchor, a dip angle,
and a bounded per-step lateral jitter that makes the trace wavy. The
perturbations (salt noise, shift, fragmentation, thickening) model
typical prediction defects, which lets experiments measure how each
metric reacts to a *known* kind and amount of damage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
from scipy.ndimage import binary_dilation

from .errors import NotFoundWithinBudget, SaltNoiseOverflow
from .metrics import MetricResult, evaluate_pair
from .types import FaultMask, as_grid


class PerturbKind(Enum):
    SALT_NOISE = "salt_noise"
    SHIFT = "shift"
    FRAGMENT = "fragment"
    THICKEN = "thicken"


@dataclass(frozen=True)
class FaultSpec:
    """Recipe for one synthetic fault mask.

    ``dip_range`` is in degrees from horizontal (90 = vertical);
    ``length_range`` is an inclusive pixel interval; ``waviness``
    bounds the per-step lateral jitter in pixels.
    """

    image_h: int
    image_w: int
    fault_count: int
    length_range: tuple[int, int]
    dip_range: tuple[float, float]
    waviness: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.image_h < 1 or self.image_w < 1:
            raise ValueError(f"image must be at least 1x1, got "
                             f"{self.image_h}x{self.image_w}")
        if self.fault_count < 0:
            raise ValueError(f"fault_count must be >= 0, got {self.fault_count}")
        lo, hi = self.length_range
        if not 1 <= lo <= hi:
            raise ValueError(f"length_range must satisfy 1 <= lo <= hi, got {self.length_range}")
        dlo, dhi = self.dip_range
        if dlo > dhi:
            raise ValueError(f"dip_range must be ordered, got {self.dip_range}")
        if self.waviness < 0:
            raise ValueError(f"waviness must be >= 0, got {self.waviness}")


@dataclass(frozen=True)
class PerturbSpec:
    """One perturbation: a kind, a kind-specific magnitude, and a seed.

    Magnitudes: SALT_NOISE takes a pixel count, SHIFT a (rows, cols)
    offset pair, FRAGMENT a per-pixel deletion probability, THICKEN a
    disk radius.
    """

    kind: PerturbKind
    magnitude: float | int | tuple[int, int]
    seed: int = 0


def disk(radius: int) -> np.ndarray:
    """Boolean disk footprint: pixels with squared distance <= radius**2.

    radius 0 is the single center pixel; radius 1 is the 3x3 cross.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    span = np.arange(-radius, radius + 1)
    rr, cc = np.meshgrid(span, span, indexing="ij")
    return rr * rr + cc * cc <= radius * radius


def gen_faults(spec: FaultSpec) -> FaultMask:
    """Draw ``fault_count`` wavy one-pixel polylines, clipped to bounds.

    Deterministic in ``spec.seed``: the same spec always yields the
    same mask.
    """
    rng = np.random.default_rng(spec.seed)
    grid = np.zeros((spec.image_h, spec.image_w), dtype=bool)
    lo, hi = spec.length_range
    for _ in range(spec.fault_count):
        length = int(rng.integers(lo, hi + 1))
        dip = math.radians(float(rng.uniform(*spec.dip_range)))
        r0 = float(rng.integers(0, spec.image_h))
        c0 = float(rng.integers(0, spec.image_w))
        # March along the dip direction; jitter walks the trace sideways.
        steps = rng.uniform(-spec.waviness, spec.waviness, size=max(length - 1, 0))
        lateral = np.concatenate(([0.0], np.cumsum(steps)))
        t = np.arange(length, dtype=np.float64)
        down, across = math.sin(dip), math.cos(dip)
        rows = np.rint(r0 + t * down + lateral * across).astype(np.int64)
        cols = np.rint(c0 + t * across - lateral * down).astype(np.int64)
        keep = (rows >= 0) & (rows < spec.image_h) & (cols >= 0) & (cols < spec.image_w)
        grid[rows[keep], cols[keep]] = True
    return FaultMask(grid)


def perturb(mask: FaultMask | np.ndarray, spec: PerturbSpec) -> FaultMask:
    """Apply one perturbation; deterministic in ``spec.seed``."""
    grid = as_grid(mask).copy()
    rng = np.random.default_rng(spec.seed)

    if spec.kind is PerturbKind.SALT_NOISE:
        count = int(spec.magnitude)
        if count < 0:
            raise ValueError(f"salt noise count must be >= 0, got {count}")
        background = np.flatnonzero(~grid)
        if count > background.size:
            raise SaltNoiseOverflow(
                f"requested {count} noise pixels, only {background.size} background"
            )
        picked = rng.choice(background, size=count, replace=False)
        grid.flat[picked] = True
        return FaultMask(grid)

    if spec.kind is PerturbKind.SHIFT:
        dr, dc = (int(v) for v in spec.magnitude)  # type: ignore[misc]
        h, w = grid.shape
        out = np.zeros_like(grid)
        src = grid[max(-dr, 0):h - max(dr, 0), max(-dc, 0):w - max(dc, 0)]
        out[max(dr, 0):h + min(dr, 0), max(dc, 0):w + min(dc, 0)] = src
        return FaultMask(out)

    if spec.kind is PerturbKind.FRAGMENT:
        prob = float(spec.magnitude)
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"fragment probability must be in [0, 1], got {prob}")
        fg = np.flatnonzero(grid)
        drop = rng.random(fg.size) < prob
        grid.flat[fg[drop]] = False
        return FaultMask(grid)

    if spec.kind is PerturbKind.THICKEN:
        radius = int(spec.magnitude)
        if radius < 0:
            raise ValueError(f"thicken radius must be >= 0, got {radius}")
        if radius == 0:
            return FaultMask(grid)
        return FaultMask(binary_dilation(grid, structure=disk(radius)))

    raise ValueError(f"unknown perturbation kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Experiment 1: metric sensitivity to fault sparsity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsityTrial:
    trial: int
    few: MetricResult
    many: MetricResult


@dataclass(frozen=True)
class SparsityResult:
    """Per-trial metrics plus their means for the few/many fault arms."""

    rows: tuple[SparsityTrial, ...]
    means: dict[str, float]

    FIELDS = ("dice", "jaccard", "bcd", "modified_hausdorff")

    def rows_as_dicts(self) -> list[dict]:
        out = []
        for row in self.rows:
            d = {"trial": row.trial}
            for arm, res in (("few", row.few), ("many", row.many)):
                for name in self.FIELDS:
                    d[f"{arm}_{name}"] = getattr(res, name)
            out.append(d)
        return out


# Distinct seed offsets keep the mask stream and the two noise streams
# independent within a trial.
_NOISE_OFFSET_FEW = 20_011
_NOISE_OFFSET_MANY = 30_011


def sparsity_trial_masks(
    few: FaultSpec,
    many: FaultSpec,
    noise_pixels: int,
    seed: int,
    trial: int,
) -> dict[str, FaultMask]:
    """The four masks of one sparsity trial, keyed {few,many}_{clean,noisy}."""
    trial_seed = seed + trial
    out: dict[str, FaultMask] = {}
    for arm, spec, offset in (
        ("few", few, _NOISE_OFFSET_FEW),
        ("many", many, _NOISE_OFFSET_MANY),
    ):
        clean = gen_faults(replace(spec, seed=spec.seed + trial_seed))
        noisy = perturb(
            clean,
            PerturbSpec(PerturbKind.SALT_NOISE, noise_pixels,
                        seed=trial_seed + offset),
        )
        out[f"{arm}_clean"] = clean
        out[f"{arm}_noisy"] = noisy
    return out


def run_sparsity_experiment(
    few: FaultSpec,
    many: FaultSpec,
    noise_pixels: int,
    trials: int,
    seed: int = 0,
) -> SparsityResult:
    """Salt both arms with the same noise count and score noisy vs clean.

    Per trial t, the effective seeds derive from ``seed + t``; the same
    arguments always reproduce the same table. The clean mask is the
    ground truth and the salted mask plays the prediction, so the only
    "error" is the identical amount of stray noise in each arm.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if noise_pixels < 0:
        raise ValueError(f"noise_pixels must be >= 0, got {noise_pixels}")
    rows = []
    for t in range(trials):
        masks = sparsity_trial_masks(few, many, noise_pixels, seed, t)
        rows.append(
            SparsityTrial(
                trial=t,
                few=evaluate_pair(masks["few_noisy"], masks["few_clean"]),
                many=evaluate_pair(masks["many_noisy"], masks["many_clean"]),
            )
        )

    means: dict[str, float] = {}
    for arm in ("few", "many"):
        for name in SparsityResult.FIELDS:
            vals = [getattr(getattr(r, arm), name) for r in rows]
            means[f"{arm}_{name}"] = float(np.mean(vals))
    return SparsityResult(rows=tuple(rows), means=means)


# ---------------------------------------------------------------------------
# Experiment 2: find two predictions the metrics rank in opposite order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContradictionPair:
    """Two predictions where Dice and BCD disagree about which is better.

    ``better_dice`` wins on Dice yet loses on BCD (higher squared
    distance) against ``better_bcd``.
    """

    ground_truth: FaultMask
    better_dice: FaultMask
    better_bcd: FaultMask
    better_dice_result: MetricResult
    better_bcd_result: MetricResult
    candidates_tried: int


def _random_damage(gt: FaultMask, rng: np.random.Generator) -> FaultMask:
    """One random shift + fragment + thicken chain applied to the truth."""
    sub = rng.integers(0, 2**31, size=3)
    shift = (int(rng.integers(-8, 9)), int(rng.integers(-8, 9)))
    out = perturb(gt, PerturbSpec(PerturbKind.SHIFT, shift, seed=int(sub[0])))
    prob = float(rng.uniform(0.0, 0.6))
    out = perturb(out, PerturbSpec(PerturbKind.FRAGMENT, prob, seed=int(sub[1])))
    radius = int(rng.integers(0, 3))
    out = perturb(out, PerturbSpec(PerturbKind.THICKEN, radius, seed=int(sub[2])))
    return out


def find_contradiction_pair(
    gt_spec: FaultSpec,
    search_budget: int,
    seed: int = 0,
) -> ContradictionPair:
    """Search random damage chains until two candidates disagree.

    Candidates B and C disagree when sign(dice_B - dice_C) equals
    sign(bcd_B - bcd_C): the mask with better overlap sits farther away
    in squared chamfer distance. Raises NotFoundWithinBudget after
    ``search_budget`` candidates (budget 0 fails immediately).
    """
    if search_budget < 0:
        raise ValueError(f"search_budget must be >= 0, got {search_budget}")
    gt = gen_faults(gt_spec)
    rng = np.random.default_rng(seed)
    seen: list[tuple[FaultMask, MetricResult]] = []
    for tried in range(1, search_budget + 1):
        candidate = _random_damage(gt, rng)
        if not candidate.grid.any():
            continue
        result = evaluate_pair(candidate, gt)
        if result.is_degenerate():
            continue
        for prior_mask, prior in seen:
            d_diff = prior.dice - result.dice
            b_diff = prior.bcd - result.bcd  # type: ignore[operator]
            if d_diff * b_diff > 0:
                if d_diff > 0:  # prior wins Dice but carries the larger BCD
                    return ContradictionPair(gt, prior_mask, candidate,
                                             prior, result, tried)
                return ContradictionPair(gt, candidate, prior_mask,
                                         result, prior, tried)
        seen.append((candidate, result))
    raise NotFoundWithinBudget(
        f"no metric contradiction among {search_budget} candidates"
    )
