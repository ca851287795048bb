import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultbench import oracle
from faultbench.errors import DimensionMismatch, EmptyMask
from faultbench.metrics import (
    Degeneracy,
    bcd,
    dice,
    distance_transform,
    evaluate_pair,
    jaccard,
    modified_hausdorff,
)


def mask_at(shape, coords):
    grid = np.zeros(shape, bool)
    for r, c in coords:
        grid[r, c] = True
    return grid


def random_pair(seed, max_side=64, density=0.08):
    rng = np.random.default_rng(seed)
    h = int(rng.integers(2, max_side + 1))
    w = int(rng.integers(2, max_side + 1))
    pred = rng.random((h, w)) < density
    gt = rng.random((h, w)) < density
    return pred, gt


class TestOverlap:
    def test_dice_pinned(self):
        pred = mask_at((4, 4), [(0, 0), (0, 1)])
        gt = mask_at((4, 4), [(0, 0), (0, 1), (1, 0), (1, 1)])
        assert dice(pred, gt) == pytest.approx(2 / 3, abs=1e-12)
        assert jaccard(pred, gt) == pytest.approx(0.5, abs=1e-12)

    def test_identical_masks(self):
        grid = mask_at((5, 5), [(1, 1), (2, 3), (4, 0)])
        assert dice(grid, grid) == 1.0
        assert jaccard(grid, grid) == 1.0

    def test_disjoint_masks(self):
        a = mask_at((5, 5), [(0, 0)])
        b = mask_at((5, 5), [(4, 4)])
        assert dice(a, b) == 0.0
        assert jaccard(a, b) == 0.0

    def test_both_empty_is_perfect(self):
        empty = np.zeros((6, 6), bool)
        assert dice(empty, empty) == 1.0
        assert jaccard(empty, empty) == 1.0

    def test_one_empty_is_zero(self):
        empty = np.zeros((6, 6), bool)
        other = mask_at((6, 6), [(2, 2)])
        assert dice(empty, other) == 0.0
        assert jaccard(other, empty) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dice(np.zeros((3, 3), bool), np.zeros((3, 4), bool))

    def test_symmetry(self):
        pred, gt = random_pair(0)
        assert dice(pred, gt) == dice(gt, pred)
        assert jaccard(pred, gt) == jaccard(gt, pred)


class TestDistances:
    def test_hausdorff_pinned_single_points(self):
        a = mask_at((6, 6), [(0, 0)])
        b = mask_at((6, 6), [(3, 4)])
        assert modified_hausdorff(a, b) == 5.0
        assert bcd(a, b) == 50.0

    def test_pinned_asymmetric_means(self):
        a = mask_at((3, 3), [(0, 0), (0, 1)])
        b = mask_at((3, 3), [(0, 0)])
        # a->b means: (0+1)/2 = 0.5; b->a: 0. Max is 0.5, sum of squared
        # means is 0.5.
        assert modified_hausdorff(a, b) == 0.5
        assert bcd(a, b) == 0.5

    def test_identity_is_zero(self):
        grid = mask_at((8, 8), [(1, 1), (5, 6)])
        assert modified_hausdorff(grid, grid) == 0.0
        assert bcd(grid, grid) == 0.0

    def test_symmetry(self):
        pred, gt = random_pair(1)
        if pred.any() and gt.any():
            assert modified_hausdorff(pred, gt) == modified_hausdorff(gt, pred)
            assert bcd(pred, gt) == bcd(gt, pred)

    def test_empty_raises(self):
        empty = np.zeros((4, 4), bool)
        full = mask_at((4, 4), [(0, 0)])
        for fn in (modified_hausdorff, bcd):
            with pytest.raises(EmptyMask):
                fn(empty, full)
            with pytest.raises(EmptyMask):
                fn(full, empty)

    @given(st.integers(0, 2**31 - 1), st.integers(0, 5), st.integers(0, 5))
    @settings(max_examples=40, deadline=None)
    def test_translation_equivariance(self, seed, dr, dc):
        rng = np.random.default_rng(seed)
        inner_p = rng.random((10, 10)) < 0.15
        inner_g = rng.random((10, 10)) < 0.15
        if not (inner_p.any() and inner_g.any()):
            return
        def place(inner, offset):
            grid = np.zeros((24, 24), bool)
            grid[offset[0]:offset[0] + 10, offset[1]:offset[1] + 10] = inner
            return grid
        base = (bcd(place(inner_p, (0, 0)), place(inner_g, (0, 0))),
                modified_hausdorff(place(inner_p, (0, 0)), place(inner_g, (0, 0))))
        moved = (bcd(place(inner_p, (dr, dc)), place(inner_g, (dr, dc))),
                 modified_hausdorff(place(inner_p, (dr, dc)), place(inner_g, (dr, dc))))
        assert moved == pytest.approx(base, abs=1e-9)


class TestDistanceTransform:
    def test_matches_brute_force_on_seeded_48x48(self):
        rng = np.random.default_rng(4242)
        grid = rng.random((48, 48)) < 0.05
        if not grid.any():
            grid[0, 0] = True
        fast = distance_transform(grid)
        slow = oracle.distance_transform_reference(grid)
        assert np.abs(fast - slow).max() < 1e-9

    def test_zero_on_foreground(self):
        grid = mask_at((9, 9), [(2, 2), (7, 8)])
        dt = distance_transform(grid)
        assert (dt[grid] == 0).all()
        assert dt[2, 3] == 1.0
        assert dt[3, 3] == pytest.approx(np.sqrt(2), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(EmptyMask):
            distance_transform(np.zeros((5, 5), bool))


class TestEvaluatePair:
    def test_non_degenerate_fields(self):
        pred, gt = random_pair(7)
        if not (pred.any() and gt.any()):
            pred[0, 0] = gt[1, 1] = True
        res = evaluate_pair(pred, gt)
        assert res.degenerate is Degeneracy.NONE
        assert res.bcd == bcd(pred, gt)
        assert res.modified_hausdorff == modified_hausdorff(pred, gt)
        assert res.dice == dice(pred, gt)

    def test_degenerate_cases(self):
        empty = np.zeros((5, 5), bool)
        some = mask_at((5, 5), [(2, 2)])
        both = evaluate_pair(empty, empty)
        assert both.degenerate is Degeneracy.BOTH_EMPTY
        assert both.dice == 1.0 and both.jaccard == 1.0
        assert both.bcd is None and both.modified_hausdorff is None
        assert evaluate_pair(empty, some).degenerate is Degeneracy.PRED_EMPTY
        assert evaluate_pair(some, empty).degenerate is Degeneracy.GT_EMPTY
        assert evaluate_pair(empty, some).dice == 0.0

    def test_jaccard_dice_identity(self):
        for seed in range(25):
            pred, gt = random_pair(seed)
            res = evaluate_pair(pred, gt)
            if res.degenerate is Degeneracy.NONE:
                assert abs(res.jaccard - res.dice / (2.0 - res.dice)) < 1e-9


class TestOracleAgreement:
    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=60, deadline=None)
    def test_all_metrics_match_reference(self, seed):
        pred, gt = random_pair(seed, max_side=32)
        assert dice(pred, gt) == pytest.approx(
            oracle.dice_reference(pred, gt), abs=1e-12
        )
        assert jaccard(pred, gt) == pytest.approx(
            oracle.jaccard_reference(pred, gt), abs=1e-12
        )
        if pred.any() and gt.any():
            assert modified_hausdorff(pred, gt) == pytest.approx(
                oracle.modified_hausdorff_reference(pred, gt), abs=1e-9
            )
            assert bcd(pred, gt) == pytest.approx(
                oracle.bcd_reference(pred, gt), abs=1e-9
            )


class TestStructureTolerance:
    def test_overlap_blind_to_where_errors_sit(self):
        """Two predictions with identical Dice can have wildly different
        boundary distances: overlap counts errors, distances weigh how
        far away they are."""
        gt = np.zeros((64, 64), bool)
        gt[:, 32] = True
        near = gt.copy()
        near[:, 31] = True  # 64 extra pixels hugging the fault
        far = gt.copy()
        far[np.arange(0, 64), (np.arange(64) * 7 + 3) % 28] = True  # 64 strays
        assert dice(near, gt) == pytest.approx(dice(far, gt), abs=1e-12)
        assert bcd(far, gt) > 10 * bcd(near, gt)
        assert modified_hausdorff(far, gt) > 5 * modified_hausdorff(near, gt)
