"""Pyramid fusion dark channel prior (PF-DCP).

The hazy image is halved until another level would be smaller than the
dark-channel patch. One atmospheric light is chosen across all levels, a
refined transmission map is estimated per level, and the maps are folded
from coarsest to finest with a fixed pair of weights. The fused map gets a
last full-resolution guided-filter pass before recovery.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dcp import DehazeParams, dark_channel, estimate_atmosphere, estimate_transmission, recover
from .guidedfilter import level_radius, refine_transmission
from .imgcore import check_gray, check_rgb, downsample_half, to_gray, upsample_nearest


@dataclass(frozen=True)
class FusionWeights:
    """Weights of the coarser (``low``) and finer (``high``) map in one fusion step."""

    low: float = 4.0
    high: float = 1.0

    def __post_init__(self):
        if self.low < 0 or self.high < 0:
            raise ValueError("fusion weights must be nonnegative")
        if self.low + self.high <= 0:
            raise ValueError("fusion weights must not both be zero")

    @classmethod
    def from_params(cls, params: DehazeParams) -> "FusionWeights":
        return cls(params.fusion_low_weight, params.fusion_high_weight)


INDOOR = FusionWeights(4.0, 1.0)
OUTDOOR = FusionWeights(80.0, 1.0)


def build_pyramid(img: np.ndarray, patch: int) -> list[np.ndarray]:
    """Halve ``img`` repeatedly while both sides stay >= ``patch``.

    Level 0 is the input itself.
    """
    img = check_rgb(img)
    h, w = img.shape[:2]
    if min(h, w) < patch:
        raise ValueError(f"image {w}x{h} is smaller than the {patch}x{patch} patch")
    levels = [img]
    while True:
        nxt = downsample_half(levels[-1])
        if nxt.shape == levels[-1].shape or min(nxt.shape[:2]) < patch:
            break
        levels.append(nxt)
    return levels


def pyramid_level_count(width: int, height: int, patch: int) -> int:
    """Number of levels ``build_pyramid`` yields, without touching pixels."""
    if min(width, height) < patch:
        raise ValueError(f"image {width}x{height} is smaller than the {patch}x{patch} patch")
    count = 1
    while (width > 1 or height > 1):
        width, height = (width + 1) // 2, (height + 1) // 2
        if min(width, height) < patch:
            break
        count += 1
    return count


def pf_estimate_atmosphere(levels: list[np.ndarray], params: DehazeParams) -> np.ndarray:
    """Brightest (largest channel sum) per-level atmospheric light estimate.

    Ties go to the finer level.
    """
    best, best_sum = None, -np.inf
    for level in levels:
        candidate = estimate_atmosphere(level, dark_channel(level, params.patch), params.top_fraction)
        if candidate.sum() > best_sum:
            best, best_sum = candidate, candidate.sum()
    return best


def fuse_transmissions(t_low: np.ndarray, t_high: np.ndarray, weights: FusionWeights) -> np.ndarray:
    """Weighted mean of an upsampled coarse map and a fine map of equal size."""
    t_low = check_gray(t_low, "coarse transmission")
    t_high = check_gray(t_high, "fine transmission")
    if t_low.shape != t_high.shape:
        raise ValueError(f"transmission maps differ in size: {t_low.shape} vs {t_high.shape}")
    fused = (weights.low * t_low + weights.high * t_high) / (weights.low + weights.high)
    # a convex combination can only leave [lo, hi] by rounding
    return np.clip(fused, np.minimum(t_low, t_high), np.maximum(t_low, t_high))


@dataclass
class PyramidStages:
    """Every intermediate of one PF-DCP run, for inspection and dumps."""

    levels: list[np.ndarray]
    atmosphere: np.ndarray
    raw: list[np.ndarray] = field(default_factory=list)
    refined: list[np.ndarray] = field(default_factory=list)
    fused: np.ndarray | None = None
    final: np.ndarray | None = None
    dehazed: np.ndarray | None = None


def pfdcp_stages(img: np.ndarray, params: DehazeParams | None = None) -> PyramidStages:
    params = params or DehazeParams()
    levels = build_pyramid(img, params.patch)
    weights = FusionWeights.from_params(params)
    stages = PyramidStages(levels, pf_estimate_atmosphere(levels, params))

    for k, level in enumerate(levels):
        t = estimate_transmission(level, stages.atmosphere, params)
        stages.raw.append(t)
        radius = level_radius(params.gf_radius, k)
        stages.refined.append(refine_transmission(to_gray(level), t, radius, params.gf_eps))

    fused = stages.refined[-1]
    for finer in reversed(stages.refined[:-1]):
        h, w = finer.shape
        fused = fuse_transmissions(upsample_nearest(fused, w, h), finer, weights)
    stages.fused = fused

    if len(levels) == 1:
        # nothing was fused, the map is already refined once
        stages.final = fused
    else:
        stages.final = refine_transmission(to_gray(levels[0]), fused, params.gf_radius, params.gf_eps)
    stages.dehazed = recover(levels[0], stages.atmosphere, stages.final, params.t0)
    return stages


def dehaze_pfdcp(img: np.ndarray, params: DehazeParams | None = None):
    """PF-DCP dehazing.

    Returns:
        ``(dehazed, final_transmission, atmosphere)``.
    """
    stages = pfdcp_stages(img, params)
    return stages.dehazed, stages.final, stages.atmosphere
