"""Quality metrics matching the report conventions of the dataset producer."""

from __future__ import annotations

import math

import numpy as np

PSNR_INF = math.inf


def mse(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a.astype(np.float64) - b.astype(np.float64)
    return float(np.mean(d * d))


def psnr(a: np.ndarray, b: np.ndarray, max_i: float = 1.0) -> float:
    err = mse(a, b)
    if err == 0.0:
        return PSNR_INF
    return 10.0 * math.log10(max_i * max_i / err)


def _gaussian_1d(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _valid_sep_corr(arr: np.ndarray, g: np.ndarray) -> np.ndarray:
    rows = np.stack([np.convolve(r, g, mode="valid") for r in arr])
    return np.stack([np.convolve(c, g, mode="valid") for c in rows.T]).T


def ssim(a: np.ndarray, b: np.ndarray, dynamic_range: float = 1.0) -> float:
    """Gaussian-window (11x11, sigma 1.5) SSIM over the valid region; falls
    back to a single whole-image evaluation for images smaller than the window."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    x = a.astype(np.float64)
    y = b.astype(np.float64)
    c1 = (0.01 * dynamic_range) ** 2
    c2 = (0.03 * dynamic_range) ** 2
    if min(a.shape) < 11:
        mx, my = x.mean(), y.mean()
        vx, vy = x.var(), y.var()
        cxy = float(np.mean((x - mx) * (y - my)))
        return float(((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx**2 + my**2 + c1) * (vx + vy + c2)))
    g = _gaussian_1d()
    mx = _valid_sep_corr(x, g)
    my = _valid_sep_corr(y, g)
    vx = _valid_sep_corr(x * x, g) - mx * mx
    vy = _valid_sep_corr(y * y, g) - my * my
    cxy = _valid_sep_corr(x * y, g) - mx * my
    local = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    return float(local.mean())


def increase_ratio(pre_val: float, post_val: float) -> float:
    """Relative percentage change; equal values (including inf/inf) give 0."""
    if pre_val == post_val:
        return 0.0
    if pre_val == 0.0:
        raise ValueError("increase ratio undefined for a zero baseline")
    return 100.0 * (post_val - pre_val) / pre_val
