"""Separable resampling with the classic six-kernel family.

The resize engine maps output index j along an axis with scale s = out/in
to the source coordinate u = (j + 0.5)/s - 0.5.  When shrinking with
anti-aliasing the kernel is widened by the shrink factor so each output
pixel averages a proportionally larger source neighborhood; out-of-range
taps are clamped to the edge (replication) and per-pixel weights are
renormalized to sum to 1, so constant images are always preserved.

``coarsen`` produces a lower-resolution image (larger pixel pitch) and
``refine`` a higher-resolution-sized one; both are thin wrappers over
``resize``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoreScaleError
from .image import GrayImage

METHOD_NAMES = ("nearest", "box", "bilinear", "bicubic", "lanczos2", "lanczos3")

_SUPPORT = {
    "nearest": 0.5,
    "box": 0.5,
    "bilinear": 1.0,
    "bicubic": 2.0,
    "lanczos2": 2.0,
    "lanczos3": 3.0,
}


@dataclass(frozen=True)
class ResampleMethod:
    """One of the six kernels; ``bicubic_a`` only affects bicubic."""

    name: str
    bicubic_a: float = -0.5

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise CoreScaleError("bad-method", f"unknown method {self.name!r}, expected one of {METHOD_NAMES}")

    @property
    def support(self) -> float:
        return _SUPPORT[self.name]


def method(name: str, bicubic_a: float = -0.5) -> ResampleMethod:
    return ResampleMethod(name, bicubic_a)


def all_methods() -> list[ResampleMethod]:
    return [ResampleMethod(n) for n in METHOD_NAMES]


def _sinc(x: float) -> float:
    if x == 0.0:
        return 1.0
    px = math.pi * x
    return math.sin(px) / px


def kernel_weight(m: ResampleMethod, t: float) -> float:
    """1-D kernel value at offset ``t``.

    box/nearest are 1 on [-0.5, 0.5) and 0 elsewhere; bilinear is the
    triangle max(0, 1-|t|); bicubic is the two-branch cubic with parameter
    ``bicubic_a``; lanczosN is sinc(t)*sinc(t/N) inside |t| < N (exactly 0
    at nonzero integers).
    """
    if not math.isfinite(t):
        raise CoreScaleError("bad-offset", "kernel offset must be finite")
    if m.name in ("nearest", "box"):
        return 1.0 if -0.5 <= t < 0.5 else 0.0
    at = abs(t)
    if m.name == "bilinear":
        return max(0.0, 1.0 - at)
    if m.name == "bicubic":
        a = m.bicubic_a
        if at <= 1.0:
            return (a + 2.0) * at**3 - (a + 3.0) * at**2 + 1.0
        if at <= 2.0:
            return a * at**3 - 5.0 * a * at**2 + 8.0 * a * at - 4.0 * a
        return 0.0
    n = 2.0 if m.name == "lanczos2" else 3.0
    if at >= n:
        return 0.0
    if t == math.floor(t):  # sinc vanishes exactly at nonzero integers
        return 1.0 if t == 0.0 else 0.0
    return _sinc(t) * _sinc(t / n)


@dataclass(frozen=True)
class ResampleSpec:
    """Method + output dims + anti-alias policy; fully determines a resize.

    ``antialias`` only matters when an axis shrinks.  ``kernel_stretch``,
    when set, widens the kernel by a fixed factor on both axes regardless
    of scale (a fixed capture aperture); nearest is exempt from both.
    """

    method: ResampleMethod
    out_width: int
    out_height: int
    antialias: bool = True
    kernel_stretch: float | None = None

    def __post_init__(self):
        if self.out_width < 1 or self.out_height < 1:
            raise CoreScaleError("bad-size", f"output dims must be >= 1, got {self.out_width}x{self.out_height}")


def _axis_matrix(n_in: int, n_out: int, m: ResampleMethod, antialias: bool,
                 kernel_stretch: float | None) -> np.ndarray:
    """Dense (n_out, n_in) weight matrix for one axis."""
    s = n_out / n_in
    if m.name == "nearest":
        stretch = 1.0
    elif kernel_stretch is not None:
        stretch = float(kernel_stretch)
    elif antialias and s < 1.0:
        stretch = n_in / n_out
    else:
        stretch = 1.0
    radius = m.support * stretch

    w = np.zeros((n_out, n_in), dtype=np.float64)
    for j in range(n_out):
        u = (j + 0.5) / s - 0.5
        if m.name == "nearest":
            idx = min(max(int(math.floor(u + 0.5)), 0), n_in - 1)
            w[j, idx] = 1.0
            continue
        lo = int(math.floor(u - radius))
        hi = int(math.ceil(u + radius))
        taps = np.arange(lo, hi + 1)
        tw = np.array([kernel_weight(m, (i - u) / stretch) for i in taps])
        clamped = np.clip(taps, 0, n_in - 1)
        np.add.at(w[j], clamped, tw)
        total = w[j].sum()
        if total <= 0.0:
            raise CoreScaleError("degenerate-kernel", f"kernel weights sum to {total} at output index {j}")
        w[j] /= total
    return w


def resize(img: GrayImage, spec: ResampleSpec) -> GrayImage:
    """Separable two-pass resize (horizontal then vertical)."""
    wh = _axis_matrix(img.width, spec.out_width, spec.method, spec.antialias, spec.kernel_stretch)
    wv = _axis_matrix(img.height, spec.out_height, spec.method, spec.antialias, spec.kernel_stretch)
    out = wv @ (img.pixels @ wh.T)
    return img.with_pixels(out)


def coarsen(img: GrayImage, factor: int, m: ResampleMethod, antialias: bool = True) -> GrayImage:
    """Generate a lower-resolution image: out dims = floor(in/factor).

    Anti-aliasing is on by default; the result's pixel pitch is the input
    pitch times ``factor``.
    """
    if factor < 1:
        raise CoreScaleError("bad-factor", f"factor must be >= 1, got {factor}")
    out_w, out_h = img.width // factor, img.height // factor
    if out_w < 1 or out_h < 1:
        raise CoreScaleError("bad-size", f"coarsening {img.width}x{img.height} by {factor} yields an empty image")
    out = resize(img, ResampleSpec(m, out_w, out_h, antialias=antialias))
    pitch = None if img.pixel_pitch is None else img.pixel_pitch * factor
    return GrayImage(out.pixels, pixel_pitch=pitch, source_tag=img.source_tag)


def refine(img: GrayImage, factor: int, m: ResampleMethod) -> GrayImage:
    """Generate a higher-resolution-sized image: out dims = in dims * factor."""
    if factor < 1:
        raise CoreScaleError("bad-factor", f"factor must be >= 1, got {factor}")
    out = resize(img, ResampleSpec(m, img.width * factor, img.height * factor))
    pitch = None if img.pixel_pitch is None else img.pixel_pitch / factor
    return GrayImage(out.pixels, pixel_pitch=pitch, source_tag=img.source_tag)
