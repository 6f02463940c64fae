"""Full-reference quality metrics (PSNR, SSIM)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imgcore import check_rgb, to_gray

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class EvalRecord:
    image_id: str
    psnr: float
    ssim: float
    wall_ms: float


def _check_pair(a, b):
    a, b = check_rgb(a, "first image"), check_rgb(b, "second image")
    if a.shape != b.shape:
        raise ValueError(f"image sizes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for images in [0, 1].

    Identical images give ``math.inf``.
    """
    a, b = _check_pair(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return math.inf
    return float(10.0 * np.log10(1.0 / mse))


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2
    w = np.exp(-(x * x) / (2 * sigma * sigma))
    return w / w.sum()


def _valid_filter(img: np.ndarray, w: np.ndarray) -> np.ndarray:
    # separable correlation, keeping only positions where the window fits
    k = len(w)
    h, wd = img.shape
    rows = sum(w[i] * img[i:h - k + 1 + i, :] for i in range(k))
    return sum(w[i] * rows[:, i:wd - k + 1 + i] for i in range(k))


def _ssim_gray(x: np.ndarray, y: np.ndarray) -> float:
    w = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2
    mu_x = _valid_filter(x, w)
    mu_y = _valid_filter(y, w)
    var_x = _valid_filter(x * x, w) - mu_x * mu_x
    var_y = _valid_filter(y * y, w) - mu_y * mu_y
    cov = _valid_filter(x * y, w) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def ssim(a: np.ndarray, b: np.ndarray, channel_average: bool = True) -> float:
    """Single-scale SSIM (11x11 Gaussian window, sigma 1.5, data range 1).

    The SSIM map is averaged over window positions that lie fully inside
    the image. With ``channel_average`` the three channel scores are
    averaged, otherwise SSIM is taken on Rec.601 luminance.
    """
    a, b = _check_pair(a, b)
    if min(a.shape[:2]) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}")
    if not channel_average:
        return _ssim_gray(to_gray(a), to_gray(b))
    return float(np.mean([_ssim_gray(a[:, :, c], b[:, :, c]) for c in range(3)]))
