"""Separable resampling used at reconstruction time.

Reconstruction must resize incoming low-resolution images with the same
family of kernels the training set was generated with; the math is the
standard half-pixel-centered convention: output index j at scale
s = out/in samples the source at u = (j + 0.5)/s - 0.5, edges replicate,
and per-pixel weights renormalize to 1. Shrinking widens the kernel by
the shrink factor (anti-aliasing); enlarging never does.
"""

from __future__ import annotations

import math

import numpy as np

METHOD_NAMES = ("nearest", "box", "bilinear", "bicubic", "lanczos2", "lanczos3")
_SUPPORT = {"nearest": 0.5, "box": 0.5, "bilinear": 1.0, "bicubic": 2.0, "lanczos2": 2.0, "lanczos3": 3.0}


def kernel(name: str, t: float, a: float = -0.5) -> float:
    if name in ("nearest", "box"):
        return 1.0 if -0.5 <= t < 0.5 else 0.0
    x = abs(t)
    if name == "bilinear":
        return max(0.0, 1.0 - x)
    if name == "bicubic":
        if x <= 1.0:
            return (a + 2.0) * x**3 - (a + 3.0) * x**2 + 1.0
        if x <= 2.0:
            return a * x**3 - 5.0 * a * x**2 + 8.0 * a * x - 4.0 * a
        return 0.0
    n = {"lanczos2": 2.0, "lanczos3": 3.0}[name]
    if x >= n:
        return 0.0
    if t == math.floor(t):
        return 1.0 if t == 0.0 else 0.0
    return (math.sin(math.pi * t) / (math.pi * t)) * (math.sin(math.pi * t / n) / (math.pi * t / n))


def _axis_matrix(n_in: int, n_out: int, name: str, antialias: bool) -> np.ndarray:
    s = n_out / n_in
    w = np.zeros((n_out, n_in))
    stretch = (n_in / n_out) if (antialias and s < 1.0 and name != "nearest") else 1.0
    radius = _SUPPORT[name] * stretch
    for j in range(n_out):
        u = (j + 0.5) / s - 0.5
        if name == "nearest":
            w[j, min(max(int(math.floor(u + 0.5)), 0), n_in - 1)] = 1.0
            continue
        for i in range(int(math.floor(u - radius)), int(math.ceil(u + radius)) + 1):
            w[j, min(max(i, 0), n_in - 1)] += kernel(name, (i - u) / stretch)
        w[j] /= w[j].sum()
    return w


def _resize(arr: np.ndarray, out_h: int, out_w: int, name: str, antialias: bool) -> np.ndarray:
    if name not in METHOD_NAMES:
        raise ValueError(f"unknown method {name!r}")
    wh = _axis_matrix(arr.shape[1], out_w, name, antialias)
    wv = _axis_matrix(arr.shape[0], out_h, name, antialias)
    return wv @ (arr @ wh.T)


def refine(arr: np.ndarray, factor: int, name: str) -> np.ndarray:
    """Enlarge by an integer factor (plain interpolation)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    return _resize(arr, arr.shape[0] * factor, arr.shape[1] * factor, name, antialias=False)


def coarsen(arr: np.ndarray, factor: int, name: str, antialias: bool = True) -> np.ndarray:
    """Shrink by an integer factor (anti-aliased by default)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    out_h, out_w = arr.shape[0] // factor, arr.shape[1] // factor
    if out_h < 1 or out_w < 1:
        raise ValueError("output would be empty")
    return _resize(arr, out_h, out_w, name, antialias)
