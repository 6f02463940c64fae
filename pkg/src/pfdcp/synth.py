"""Forward haze model ``I = J t + A (1 - t)`` for building test data."""
from __future__ import annotations

import numpy as np

from .imgcore import box_filter, check_rgb


def synthesize_haze(clear: np.ndarray, atmosphere, transmission) -> np.ndarray:
    """Blend a clear image toward the airlight.

    Args:
        clear: (H, W, 3) scene radiance in [0, 1].
        atmosphere: RGB airlight, three values in (0, 1].
        transmission: a scalar or an (H, W) map, values in [0, 1].
    """
    clear = check_rgb(clear, "clear image")
    a = np.asarray(atmosphere, dtype=np.float64).reshape(3)
    t = np.asarray(transmission, dtype=np.float64)
    if t.ndim == 2:
        if t.shape != clear.shape[:2]:
            raise ValueError(f"transmission {t.shape} does not match image {clear.shape[:2]}")
        t = t[:, :, None]
    elif t.ndim != 0:
        raise ValueError("transmission must be a scalar or an (H, W) map")
    if np.any(t < 0) or np.any(t > 1):
        raise ValueError("transmission must lie in [0, 1]")
    return clear * t + a * (1.0 - t)


def smooth_transmission(height: int, width: int, rng: np.random.Generator,
                        t_min: float = 0.15, t_max: float = 1.0) -> np.ndarray:
    """Random smooth transmission map spanning [t_min, t_max].

    A depth-like field made by box-blurring uniform noise three times.
    """
    field = rng.random((height, width))
    radius = max(1, min(height, width) // 6)
    for _ in range(3):
        field = box_filter(field, radius)
    lo, hi = field.min(), field.max()
    if hi > lo:
        field = (field - lo) / (hi - lo)
    else:
        field = np.zeros_like(field)
    return np.clip(t_min + (t_max - t_min) * field, t_min, t_max)
