import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faultbench.errors import (
    ConstantVolume,
    CoverageGap,
    IndexOutOfRange,
    WindowLargerThanSection,
    ZeroVariance,
)
from faultbench.preprocess import (
    Axis,
    PadPolicy,
    Patch,
    Section,
    TilingSpec,
    extract_section,
    load_patches,
    normalize_minmax,
    normalize_zscore,
    save_patches,
    stitch,
    tile,
    volume_std,
)
from faultbench.types import SeismicVolume


def volume_from(values, shape):
    return SeismicVolume(np.asarray(values, np.float32).reshape(shape))


class TestNormalize:
    def test_minmax_pinned(self):
        vol = volume_from([0.0, 5.0, 10.0], (1, 1, 3))
        out = normalize_minmax(vol)
        np.testing.assert_array_equal(out.samples.ravel(), [-1.0, 0.0, 1.0])

    def test_minmax_extremes_hit_exactly(self):
        rng = np.random.default_rng(0)
        vol = SeismicVolume(rng.normal(size=(4, 5, 6)).astype(np.float32))
        out = normalize_minmax(vol).samples
        assert out.min() == -1.0 and out.max() == 1.0

    def test_minmax_constant_volume(self):
        with pytest.raises(ConstantVolume):
            normalize_minmax(volume_from([3.0] * 8, (2, 2, 2)))

    def test_zscore_pinned(self):
        vol = volume_from([0.0, 0.0, 2.0, 2.0], (1, 2, 2))
        out = normalize_zscore(vol)
        np.testing.assert_array_equal(out.samples.ravel(), [-1.0, -1.0, 1.0, 1.0])

    def test_zscore_zero_variance(self):
        with pytest.raises(ZeroVariance):
            normalize_zscore(volume_from([7.0] * 4, (1, 2, 2)))

    def test_zscore_uses_population_std(self):
        # Sample std (ddof=1) of {0,0,2,2} is 2/sqrt(3), which would give
        # +-sqrt(3)/2 instead of +-1.
        vol = volume_from([0.0, 0.0, 2.0, 2.0], (4, 1, 1))
        assert normalize_zscore(vol).samples.max() == 1.0

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_zscore_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        vol = SeismicVolume(
            (rng.normal(size=(3, 4, 5)) * rng.uniform(0.5, 50)).astype(np.float32)
        )
        once = normalize_zscore(vol)
        twice = normalize_zscore(once)
        np.testing.assert_allclose(twice.samples, once.samples, atol=1e-5)

    def test_metadata_preserved(self):
        vol = SeismicVolume(
            np.arange(8, dtype=np.float32).reshape(2, 2, 2), sample_interval_us=2000
        )
        assert normalize_minmax(vol).sample_interval_us == 2000
        assert normalize_zscore(vol).sample_interval_us == 2000


class TestVolumeStd:
    def test_pinned_values(self):
        assert volume_std(volume_from([0.0, 0.0, 2.0, 2.0], (1, 2, 2))) == 1.0
        assert volume_std(volume_from([-1.0, 1.0], (1, 1, 2))) == 1.0

    def test_scales_linearly(self):
        vol = volume_from([0.0, 0.0, 2.0, 2.0], (1, 2, 2))
        scaled = SeismicVolume(vol.samples * 3.0)
        assert volume_std(scaled) == pytest.approx(3.0, rel=1e-7)


class TestSections:
    def test_inline_orientation(self):
        vol = SeismicVolume(np.arange(2 * 3 * 4, dtype=np.float32).reshape(2, 3, 4))
        sec = extract_section(vol, Axis.INLINE, 1)
        assert sec.shape == (4, 3)  # (sample, crossline)
        for s in range(4):
            for x in range(3):
                assert sec.values[s, x] == vol.samples[1, x, s]

    def test_crossline_orientation(self):
        vol = SeismicVolume(np.arange(2 * 3 * 4, dtype=np.float32).reshape(2, 3, 4))
        sec = extract_section(vol, Axis.CROSSLINE, 2)
        assert sec.shape == (4, 2)  # (sample, inline)
        for s in range(4):
            for i in range(2):
                assert sec.values[s, i] == vol.samples[i, 2, s]

    def test_out_of_range(self):
        vol = SeismicVolume(np.zeros((2, 3, 4), np.float32))
        with pytest.raises(IndexOutOfRange):
            extract_section(vol, Axis.INLINE, 2)
        with pytest.raises(IndexOutOfRange):
            extract_section(vol, Axis.CROSSLINE, -1)

    def test_sections_partition_the_volume(self):
        rng = np.random.default_rng(1)
        vol = SeismicVolume(rng.normal(size=(5, 6, 7)).astype(np.float32))
        rebuilt = np.stack(
            [extract_section(vol, Axis.INLINE, i).values.T for i in range(5)]
        )
        np.testing.assert_array_equal(rebuilt, vol.samples)


class TestTilingSpec:
    def test_stride_bounds(self):
        with pytest.raises(ValueError):
            TilingSpec(8, 8, 0, 8)
        with pytest.raises(ValueError):
            TilingSpec(8, 8, 9, 8)
        with pytest.raises(ValueError):
            TilingSpec(0, 8, 1, 8)

    def test_square_helper(self):
        spec = TilingSpec.square(64)
        assert (spec.window_h, spec.window_w) == (64, 64)
        assert (spec.stride_h, spec.stride_w) == (64, 64)


class TestTile:
    def test_clamped_final_window_origins(self):
        patches = tile(np.zeros((100, 100), np.float32), TilingSpec.square(64, 64))
        origins = sorted((p.origin_row, p.origin_col) for p in patches)
        assert origins == [(0, 0), (0, 36), (36, 0), (36, 36)]

    def test_exact_cover_origins(self):
        patches = tile(np.zeros((128, 128), np.float32), TilingSpec.square(64, 32))
        rows = sorted({p.origin_row for p in patches})
        assert rows == [0, 32, 64]
        assert len(patches) == 9

    def test_row_major_order(self):
        patches = tile(np.zeros((100, 100), np.float32), TilingSpec.square(64, 64))
        assert [(p.origin_row, p.origin_col) for p in patches] == [
            (0, 0), (0, 36), (36, 0), (36, 36),
        ]

    def test_zero_pad_extends_with_zeros(self):
        sec = np.ones((10, 10), np.float32)
        patches = tile(sec, TilingSpec.square(8, 8, PadPolicy.ZERO_PAD))
        assert len(patches) == 4
        far = [p for p in patches if (p.origin_row, p.origin_col) == (8, 8)][0]
        assert far.values.shape == (8, 8)
        assert far.values[:2, :2].all() and not far.values[2:, :].any()

    def test_zero_pad_window_larger_than_section(self):
        patches = tile(np.ones((5, 5), np.float32),
                       TilingSpec.square(8, 8, PadPolicy.ZERO_PAD))
        assert len(patches) == 1
        assert patches[0].values.shape == (8, 8)

    def test_drop_partial_drops_remainder(self):
        patches = tile(np.zeros((100, 100), np.float32),
                       TilingSpec.square(64, 64, PadPolicy.DROP_PARTIAL))
        assert [(p.origin_row, p.origin_col) for p in patches] == [(0, 0)]

    def test_drop_partial_nothing_fits(self):
        with pytest.raises(WindowLargerThanSection):
            tile(np.zeros((32, 32), np.float32),
                 TilingSpec.square(64, 64, PadPolicy.DROP_PARTIAL))

    def test_reflect_window_larger_than_section(self):
        with pytest.raises(WindowLargerThanSection):
            tile(np.zeros((32, 32), np.float32), TilingSpec.square(64, 64))

    def test_patches_carry_section_identity(self):
        sec = Section(np.zeros((40, 40), np.float32), Axis.CROSSLINE, 7)
        patches = tile(sec, TilingSpec.square(20, 20))
        assert all(p.section_ref == ("crossline", 7) for p in patches)


class TestStitch:
    def test_mean_of_overlaps(self):
        a = Patch(np.full((2, 2), 1.0, np.float32), 0, 0)
        b = Patch(np.full((2, 2), 3.0, np.float32), 0, 1)
        out = stitch([a, b], (2, 3)).values
        np.testing.assert_array_equal(out, [[1, 2, 3], [1, 2, 3]])

    def test_coverage_gap(self):
        patches = tile(np.zeros((100, 100), np.float32),
                       TilingSpec.square(64, 64, PadPolicy.DROP_PARTIAL))
        with pytest.raises(CoverageGap):
            stitch(patches, (100, 100))

    def test_identity_all_policies(self):
        rng = np.random.default_rng(2)
        sec = rng.normal(size=(97, 113)).astype(np.float32)
        for policy in PadPolicy.REFLECT, PadPolicy.ZERO_PAD:
            patches = tile(sec, TilingSpec(32, 48, 16, 24, policy))
            out = stitch(patches, sec.shape).values
            assert np.abs(out - sec).max() < 1e-6, policy

    @given(
        st.integers(0, 2**31 - 1),
        st.integers(20, 90),
        st.integers(20, 90),
        st.integers(8, 24),
        st.sampled_from(list(PadPolicy)),
    )
    @settings(max_examples=60, deadline=None)
    def test_identity_property(self, seed, h, w, window, policy):
        rng = np.random.default_rng(seed)
        stride = int(rng.integers(1, window + 1))
        sec = rng.normal(size=(h, w)).astype(np.float32)
        try:
            patches = tile(sec, TilingSpec(window, window, stride, stride, policy))
            out = stitch(patches, sec.shape).values
        except (WindowLargerThanSection, CoverageGap):
            assert policy is PadPolicy.DROP_PARTIAL
            return
        assert np.abs(out - sec).max() < 1e-6


class TestPatchSerialization:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(3)
        sec = Section(rng.normal(size=(50, 60)).astype(np.float32), Axis.INLINE, 4)
        spec = TilingSpec(32, 32, 16, 16)
        patches = tile(sec, spec)
        save_patches(patches, spec, sec.shape, tmp_path / "set")
        loaded, spec2, shape = load_patches(tmp_path / "set")
        assert spec2 == spec
        assert shape == sec.shape
        assert len(loaded) == len(patches)
        for a, b in zip(loaded, patches):
            assert (a.origin_row, a.origin_col) == (b.origin_row, b.origin_col)
            np.testing.assert_array_equal(a.values, b.values)
            assert a.section_ref == ("inline", 4)
        out = stitch(loaded, shape).values
        assert np.abs(out - sec.values).max() < 1e-6
