"""Image containers, codecs and window primitives.

Images are plain numpy arrays of float64 in [0, 1]:
RGB images are (H, W, 3), gray images (transmission maps, dark channels,
guides) are (H, W). All functions here are pure and never modify inputs.
"""
from __future__ import annotations

import os
from pathlib import Path

import cv2
import numpy as np

# Rec.601 luma, kept as integers so white maps to exactly 1.0
_LUMA_WEIGHTS = (299, 587, 114)


def check_rgb(img: np.ndarray, name: str = "image") -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} has zero area")
    return img


def check_gray(img: np.ndarray, name: str = "image") -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"{name} must have shape (H, W), got {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"{name} has zero area")
    return img


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG/JPEG (or anything OpenCV decodes) as an RGB float image.

    8-bit samples are divided by 255, 16-bit samples by 65535. Gray files
    are replicated to three channels and alpha is dropped.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED | cv2.IMREAD_IGNORE_ORIENTATION)
    if raw is None:
        raise ValueError(f"unreadable or unsupported image: {path}")
    if raw.size == 0:
        raise ValueError(f"zero-area image: {path}")

    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise ValueError(f"unsupported sample type {raw.dtype} in {path}")

    if raw.ndim == 2:
        raw = np.repeat(raw[:, :, None], 3, axis=2)
    elif raw.shape[2] == 1:
        raw = np.repeat(raw, 3, axis=2)
    elif raw.shape[2] == 4:
        raw = raw[:, :, :3]
    rgb = raw[:, :, ::-1]  # OpenCV decodes to BGR
    return rgb.astype(np.float64) / scale


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write an RGB or gray float image as 8-bit, clamping to [0, 1] first."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim not in (2, 3) or (img.ndim == 3 and img.shape[2] != 3):
        raise ValueError(f"cannot save array of shape {img.shape}")
    data = np.rint(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    if data.ndim == 3:
        data = np.ascontiguousarray(data[:, :, ::-1])
    try:
        ok = cv2.imwrite(str(path), data)
    except cv2.error as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    if not ok:
        raise OSError(f"cannot write {path}")


def to_gray(img: np.ndarray) -> np.ndarray:
    """Luminance 0.299 r + 0.587 g + 0.114 b."""
    img = check_rgb(img)
    wr, wg, wb = _LUMA_WEIGHTS
    return (wr * img[:, :, 0] + wg * img[:, :, 1] + wb * img[:, :, 2]) / 1000.0


def downsample_half(img: np.ndarray) -> np.ndarray:
    """Keep even rows and columns; output dims are ceil(in / 2)."""
    img = np.asarray(img)
    return np.ascontiguousarray(img[::2, ::2])


def upsample_nearest(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Nearest-neighbour enlargement of a gray (or RGB) image.

    Output pixel (y, x) takes input pixel (y * in_h // out_h, x * in_w // out_w).
    """
    img = np.asarray(img)
    in_h, in_w = img.shape[:2]
    if out_w < 1 or out_h < 1:
        raise ValueError("target dimensions must be positive")
    if out_w < in_w or out_h < in_h:
        raise ValueError(
            f"upsample target {out_w}x{out_h} is smaller than source {in_w}x{in_h}"
        )
    rows = np.arange(out_h) * in_h // out_h
    cols = np.arange(out_w) * in_w // out_w
    return img[rows[:, None], cols[None, :]]


def _min_filter_1d(a: np.ndarray, size: int, axis: int) -> np.ndarray:
    # van Herk / Gil-Werman: block prefix and suffix minima, three
    # comparisons per sample independent of the window size.
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    r = size // 2
    m = -(-(n + 2 * r) // size) * size
    lead = a.shape[:-1]

    # +inf padding is the same as clipping the window at the border
    padded = np.full(lead + (m,), np.inf)
    padded[..., r:r + n] = a
    blocks = padded.reshape(lead + (m // size, size))
    prefix = np.minimum.accumulate(blocks, axis=-1).reshape(lead + (m,))
    suffix = np.minimum.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1].reshape(lead + (m,))

    # window of output i spans padded[i : i + size]
    out = np.minimum(suffix[..., :n], prefix[..., size - 1:size - 1 + n])
    return np.moveaxis(out, -1, axis)


def min_filter(img: np.ndarray, patch: int) -> np.ndarray:
    """Minimum over a patch x patch window centred on each pixel.

    Windows are clipped at the image border. Separable, O(1) per pixel.
    """
    if patch < 1 or patch % 2 == 0:
        raise ValueError(f"patch must be a positive odd integer, got {patch}")
    img = check_gray(img)
    if patch == 1:
        return img.copy()
    return _min_filter_1d(_min_filter_1d(img, patch, 0), patch, 1)


def _box_sum_1d(a: np.ndarray, radius: int, axis: int) -> np.ndarray:
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    csum = np.zeros((n + 1,) + a.shape[1:])
    np.cumsum(a, axis=0, out=csum[1:])
    idx = np.arange(n)
    hi = np.minimum(idx + radius, n - 1) + 1
    lo = np.maximum(idx - radius, 0)
    return np.moveaxis(csum[hi] - csum[lo], 0, axis)


def _window_count(n: int, radius: int) -> np.ndarray:
    idx = np.arange(n)
    return (np.minimum(idx + radius, n - 1) + 1 - np.maximum(idx - radius, 0)).astype(np.float64)


def box_filter(img: np.ndarray, radius: int) -> np.ndarray:
    """Mean over the (2r+1)^2 window, clipped at borders.

    Each output is normalised by the number of pixels actually inside the
    clipped window, so constant images stay constant up to the edges.
    Running sums are accumulated in float64.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    img = np.asarray(img, dtype=np.float64)
    if radius == 0:
        return img.copy()
    h, w = img.shape[:2]
    # offsetting by one sample keeps constant images exactly constant
    offset = img[0, 0]
    sums = _box_sum_1d(_box_sum_1d(img - offset, radius, 0), radius, 1)
    counts = np.outer(_window_count(h, radius), _window_count(w, radius))
    if img.ndim == 3:
        counts = counts[:, :, None]
    return offset + sums / counts
