"""Guided image filter used to refine transmission maps."""
from __future__ import annotations

import numpy as np

from .imgcore import box_filter, check_gray


def guided_filter(guide: np.ndarray, src: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Edge-preserving smoothing of ``src`` steered by a gray ``guide``.

    Fits ``src ~ a * guide + b`` in every (2r+1)^2 window, then averages the
    coefficients of all windows covering a pixel. The output is not clamped.

    Args:
        guide: (H, W) guidance image.
        src: (H, W) image to filter.
        radius: window radius in pixels, >= 1.
        eps: ridge regulariser on the local guide variance, > 0.
    """
    guide = check_gray(guide, "guide")
    src = check_gray(src, "input")
    if guide.shape != src.shape:
        raise ValueError(f"guide {guide.shape} and input {src.shape} differ in size")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")

    mean_i = box_filter(guide, radius)
    mean_p = box_filter(src, radius)
    cov_ip = box_filter(guide * src, radius) - mean_i * mean_p
    var_i = box_filter(guide * guide, radius) - mean_i * mean_i

    a = cov_ip / (var_i + eps)
    b = mean_p - a * mean_i
    return box_filter(a, radius) * guide + box_filter(b, radius)


def refine_transmission(guide: np.ndarray, t: np.ndarray, radius: int, eps: float) -> np.ndarray:
    """Guided-filter a transmission map and clamp the result to [0, 1]."""
    return np.clip(guided_filter(guide, t, radius, eps), 0.0, 1.0)


def level_radius(base_radius: int, level: int) -> int:
    """Guided-filter radius for pyramid level ``level`` (0 = full resolution).

    Halves with each level but never drops below 4, and never exceeds the
    full-resolution radius.
    """
    return min(base_radius, max(4, base_radius >> level))
