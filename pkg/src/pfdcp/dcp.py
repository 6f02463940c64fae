"""Single-scale dark channel prior dehazing."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .guidedfilter import refine_transmission
from .imgcore import check_gray, check_rgb, min_filter, to_gray

# keeps I / A finite on degenerate (near-black) inputs
ATMOSPHERE_FLOOR = 0.05


@dataclass(frozen=True)
class DehazeParams:
    """Tunables shared by the DCP and PF-DCP pipelines.

    Attributes:
        patch: dark-channel window size (odd).
        top_fraction: share of brightest dark-channel pixels searched for
            the atmospheric light.
        omega: fraction of haze removed; 0 leaves the image untouched.
        t0: lower bound on transmission during recovery.
        fusion_low_weight: weight of the coarser map in pyramid fusion.
        fusion_high_weight: weight of the finer map in pyramid fusion.
        gf_radius: guided-filter radius at full resolution.
        gf_eps: guided-filter regulariser.
    """

    patch: int = 15
    top_fraction: float = 0.001
    omega: float = 0.95
    t0: float = 0.1
    fusion_low_weight: float = 4.0
    fusion_high_weight: float = 1.0
    gf_radius: int = 60
    gf_eps: float = 1e-4

    def __post_init__(self):
        if int(self.patch) != self.patch or self.patch < 1 or self.patch % 2 == 0:
            raise ValueError(f"patch must be a positive odd integer, got {self.patch}")
        if not 0 < self.top_fraction <= 1:
            raise ValueError(f"top_fraction must be in (0, 1], got {self.top_fraction}")
        if not 0 <= self.omega <= 1:
            raise ValueError(f"omega must be in [0, 1], got {self.omega}")
        if not 0 < self.t0 < 1:
            raise ValueError(f"t0 must be in (0, 1), got {self.t0}")
        if self.fusion_low_weight < 0 or self.fusion_high_weight < 0:
            raise ValueError("fusion weights must be nonnegative")
        if self.fusion_low_weight + self.fusion_high_weight <= 0:
            raise ValueError("fusion weights must not both be zero")
        if int(self.gf_radius) != self.gf_radius or self.gf_radius < 1:
            raise ValueError(f"gf_radius must be a positive integer, got {self.gf_radius}")
        if not self.gf_eps > 0:
            raise ValueError(f"gf_eps must be > 0, got {self.gf_eps}")


def dark_channel(img: np.ndarray, patch: int) -> np.ndarray:
    """Windowed minimum of the per-pixel channel minimum."""
    img = check_rgb(img)
    return min_filter(img.min(axis=2), patch)


def estimate_atmosphere(img: np.ndarray, dark: np.ndarray, top_fraction: float) -> np.ndarray:
    """Atmospheric light from the haziest pixels.

    Takes the ``max(1, floor(top_fraction * H * W))`` pixels with the largest
    dark-channel value and returns the colour of the brightest one (largest
    r + g + b) among them. Ties on either ranking go to the smaller
    row-major index. Channels are clamped to [0.05, 1].

    Returns:
        Array of shape (3,).
    """
    img = check_rgb(img)
    dark = check_gray(dark, "dark channel")
    if dark.shape != img.shape[:2]:
        raise ValueError(f"dark channel {dark.shape} does not match image {img.shape[:2]}")
    if not 0 < top_fraction <= 1:
        raise ValueError(f"top_fraction must be in (0, 1], got {top_fraction}")

    n = dark.size
    k = max(1, int(np.floor(top_fraction * n)))
    # stable sort on the negated value keeps row-major order among ties
    order = np.argsort(-dark.ravel(), kind="stable")[:k]
    pixels = img.reshape(-1, 3)
    intensity = pixels[order].sum(axis=1)
    best = order[intensity == intensity.max()].min()
    return np.clip(pixels[best], ATMOSPHERE_FLOOR, 1.0)


def estimate_transmission(img: np.ndarray, atmosphere: np.ndarray, params: DehazeParams) -> np.ndarray:
    """Coarse transmission ``1 - omega * dark_channel(min(I / A, 1))``."""
    img = check_rgb(img)
    atmosphere = np.asarray(atmosphere, dtype=np.float64)
    if atmosphere.shape != (3,):
        raise ValueError(f"atmosphere must have 3 channels, got shape {atmosphere.shape}")
    if np.any(atmosphere <= 0):
        raise ValueError(f"atmosphere must be strictly positive, got {atmosphere}")
    ratio = np.minimum(img / atmosphere, 1.0)
    t = 1.0 - params.omega * dark_channel(ratio, params.patch)
    return np.clip(t, 0.0, 1.0)


def recover(img: np.ndarray, atmosphere: np.ndarray, t: np.ndarray, t0: float) -> np.ndarray:
    """Invert the haze model with transmission floored at ``t0``."""
    img = check_rgb(img)
    t = check_gray(t, "transmission")
    if t.shape != img.shape[:2]:
        raise ValueError(f"transmission {t.shape} does not match image {img.shape[:2]}")
    if not 0 < t0 < 1:
        raise ValueError(f"t0 must be in (0, 1), got {t0}")
    atmosphere = np.asarray(atmosphere, dtype=np.float64)
    tt = np.maximum(t, t0)[:, :, None]
    out = (img - atmosphere) / tt + atmosphere
    # (I - A) + A is not always I in floating point
    out = np.where(tt == 1.0, img, out)
    return np.clip(out, 0.0, 1.0)


def dehaze_dcp(img: np.ndarray, params: DehazeParams | None = None):
    """Classic DCP with guided-filter refinement.

    Returns:
        ``(dehazed, refined_transmission, atmosphere)``.
    """
    params = params or DehazeParams()
    img = check_rgb(img)
    dark = dark_channel(img, params.patch)
    atmosphere = estimate_atmosphere(img, dark, params.top_fraction)
    t = estimate_transmission(img, atmosphere, params)
    t = refine_transmission(to_gray(img), t, params.gf_radius, params.gf_eps)
    return recover(img, atmosphere, t, params.t0), t, atmosphere
