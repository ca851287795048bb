"""Frozen experiment configurations.

These values are versioned regression anchors: tests and the CLI run
the experiments with exactly these settings, so changing anything here
changes published numbers. Bump DEFAULTS_VERSION on any edit.
"""

from __future__ import annotations

from .faultlab import FaultSpec

DEFAULTS_VERSION = 1

# Sparsity experiment: identical salt-noise counts hit a sparse and a
# dense fault population. Both arms share image size and geometry; only
# the fault count (and the seed stream) differs.
SPARSITY_FEW = FaultSpec(
    image_h=512,
    image_w=512,
    fault_count=3,
    length_range=(100, 300),
    dip_range=(60.0, 120.0),
    waviness=1.0,
    seed=11,
)
SPARSITY_MANY = FaultSpec(
    image_h=512,
    image_w=512,
    fault_count=30,
    length_range=(100, 300),
    dip_range=(60.0, 120.0),
    waviness=1.0,
    seed=23,
)
SPARSITY_NOISE_PIXELS = 50
SPARSITY_TRIALS = 20
SPARSITY_SEED = 0
# Largest |1 - Dice| either arm may show while the distance gap opens
# up; measured 0.115 across the frozen trials, frozen with headroom.
SPARSITY_DICE_DRIFT_BOUND = 0.15

# Contradiction search: ground truth for the damage-chain sweep.
CONTRADICTION_GT = FaultSpec(
    image_h=128,
    image_w=128,
    fault_count=4,
    length_range=(40, 90),
    dip_range=(60.0, 120.0),
    waviness=1.0,
    seed=5,
)
CONTRADICTION_BUDGET = 256
CONTRADICTION_SEED = 0
