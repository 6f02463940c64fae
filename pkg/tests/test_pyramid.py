import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfdcp.dcp import DehazeParams, dark_channel, dehaze_dcp, estimate_atmosphere, recover
from pfdcp.guidedfilter import refine_transmission
from pfdcp.imgcore import to_gray
from pfdcp.pyramid import (
    FusionWeights,
    build_pyramid,
    dehaze_pfdcp,
    fuse_transmissions,
    pf_estimate_atmosphere,
    pfdcp_stages,
    pyramid_level_count,
)

from oracles import halving_level_count

maps = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(0, 1), min_size=n * n, max_size=n * n),
        st.lists(st.floats(0, 1), min_size=n * n, max_size=n * n),
    ).map(lambda ab: (np.reshape(ab[0], (n, n)), np.reshape(ab[1], (n, n))))
)


class TestBuildPyramid:
    def test_512(self):
        levels = build_pyramid(np.zeros((512, 512, 3)), 15)
        assert [lv.shape[0] for lv in levels] == [512, 256, 128, 64, 32, 16]

    def test_boundary(self):
        assert len(build_pyramid(np.zeros((15, 15, 3)), 15)) == 1

    def test_sots_indoor_size(self):
        levels = build_pyramid(np.zeros((460, 620, 3)), 15)
        dims = [(lv.shape[1], lv.shape[0]) for lv in levels]
        assert dims == [(620, 460), (310, 230), (155, 115), (78, 58), (39, 29), (20, 15)]

    def test_levels_are_subsampled(self, rng):
        img = rng.random((40, 37, 3))
        levels = build_pyramid(img, 5)
        for fine, coarse in zip(levels, levels[1:]):
            assert np.array_equal(coarse, fine[::2, ::2])

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_pyramid(np.zeros((14, 40, 3)), 15)

    def test_single_pixel_patch_one_terminates(self):
        assert len(build_pyramid(np.zeros((1, 1, 3)), 1)) == 1
        assert len(build_pyramid(np.zeros((1, 2, 3)), 1)) == 2

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 5000), st.integers(1, 5000), st.sampled_from([1, 3, 5, 7, 15, 31]))
    def test_count_matches_oracle(self, w, h, patch):
        if min(w, h) < patch:
            return
        assert pyramid_level_count(w, h, patch) == halving_level_count(w, h, patch)


class TestAtmosphere:
    def test_constant(self):
        img = np.full((64, 64, 3), 0.7)
        levels = build_pyramid(img, 15)
        assert np.array_equal(pf_estimate_atmosphere(levels, DehazeParams()), [0.7] * 3)

    def test_single_level_reduces(self, rng):
        img = rng.random((20, 20, 3))
        params = DehazeParams()
        levels = build_pyramid(img, 15)
        assert len(levels) == 1
        expected = estimate_atmosphere(img, dark_channel(img, 15), params.top_fraction)
        assert np.array_equal(pf_estimate_atmosphere(levels, params), expected)

    def test_picks_brightest_level_candidate(self, rng):
        # a bright blob at odd coordinates survives only where it is not subsampled away
        img = rng.random((64, 64, 3)) * 0.4
        img[33, 33] = 0.95
        params = DehazeParams(patch=1, top_fraction=0.001)
        levels = build_pyramid(img, 1)
        candidates = [estimate_atmosphere(lv, dark_channel(lv, 1), 0.001) for lv in levels]
        sums = [c.sum() for c in candidates]
        expected = candidates[int(np.argmax(sums))]
        got = pf_estimate_atmosphere(levels, params)
        assert np.array_equal(got, expected)
        assert np.array_equal(got, [0.95] * 3)

    def test_ties_go_to_finer_level(self):
        # both candidates sum to exactly 1.5
        levels = [np.full((4, 4, 3), 0.5), np.broadcast_to([0.75, 0.5, 0.25], (2, 2, 3))]
        got = pf_estimate_atmosphere(levels, DehazeParams(patch=1))
        assert np.array_equal(got, [0.5, 0.5, 0.5])


class TestFusion:
    def test_high_only(self, rng):
        lo, hi = rng.random((5, 5)), rng.random((5, 5))
        assert np.array_equal(fuse_transmissions(lo, hi, FusionWeights(0, 1)), hi)

    def test_fixed_point(self, rng):
        t = rng.random((5, 5))
        assert np.allclose(fuse_transmissions(t, t, FusionWeights(80, 1)), t, atol=0)

    def test_four_to_one(self):
        out = fuse_transmissions(np.full((3, 3), 0.2), np.full((3, 3), 0.7), FusionWeights(4, 1))
        assert np.allclose(out, 0.3, atol=1e-15)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            fuse_transmissions(np.zeros((3, 3)), np.zeros((3, 4)), FusionWeights())

    def test_zero_weights(self):
        with pytest.raises(ValueError):
            FusionWeights(0, 0)

    @settings(max_examples=100, deadline=None)
    @given(maps, st.floats(0, 100), st.floats(0.01, 100))
    def test_convex(self, pair, wl, wh):
        lo, hi = pair
        out = fuse_transmissions(lo, hi, FusionWeights(wl, wh))
        assert np.all(out >= np.minimum(lo, hi))
        assert np.all(out <= np.maximum(lo, hi))


class TestPipeline:
    def test_single_level_equals_dcp(self, rng):
        img = rng.random((20, 25, 3))
        params = DehazeParams(gf_radius=10)
        for a, b in zip(dehaze_pfdcp(img, params), dehaze_dcp(img, params)):
            assert np.array_equal(a, b)

    def test_shared_atmosphere_and_shapes(self, rng):
        img = rng.random((100, 80, 3))
        params = DehazeParams(gf_radius=20)
        stages = pfdcp_stages(img, params)
        assert len(stages.levels) == 3
        for lv, raw, ref in zip(stages.levels, stages.raw, stages.refined):
            assert raw.shape == ref.shape == lv.shape[:2]
        assert stages.final.shape == (100, 80)
        assert stages.dehazed.shape == img.shape

    def test_zero_low_weight_construction(self, rng):
        img = rng.random((64, 48, 3))
        params = DehazeParams(fusion_low_weight=0, fusion_high_weight=1, gf_radius=12)
        stages = pfdcp_stages(img, params)
        assert np.array_equal(stages.fused, stages.refined[0])
        gray = to_gray(img)
        final = refine_transmission(gray, stages.refined[0], 12, params.gf_eps)
        assert np.array_equal(stages.final, final)
        assert np.array_equal(stages.dehazed, recover(img, stages.atmosphere, final, params.t0))

    def test_fused_is_convex_of_levels(self, rng):
        img = rng.random((64, 64, 3))
        stages = pfdcp_stages(img, DehazeParams(gf_radius=16))
        assert stages.fused.min() >= min(t.min() for t in stages.refined)
        assert stages.fused.max() <= max(t.max() for t in stages.refined)

    def test_constant_image_high_weight_on_coarse(self):
        img = np.full((128, 128, 3), 0.6)
        params = DehazeParams(fusion_low_weight=1, fusion_high_weight=0)
        stages = pfdcp_stages(img, params)
        assert np.ptp(stages.fused) == 0
        assert np.ptp(stages.final) == 0

    def test_deterministic(self, rng):
        img = rng.random((70, 90, 3))
        a, b = dehaze_pfdcp(img), dehaze_pfdcp(img.copy())
        for x, y in zip(a, b):
            assert np.array_equal(x, y)
