"""Normalization, threshold segmentation and image-quality metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import CoreScaleError
from .image import GrayImage

PSNR_INF = math.inf  # sentinel for zero-MSE comparisons


@dataclass(frozen=True)
class BinaryImage:
    """Threshold-segmented raster; 1 marks the pore/fracture phase."""

    bits: np.ndarray  # (h, w) uint8 of {0, 1}
    threshold_used: float

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=np.uint8)
        if arr.ndim != 2:
            raise CoreScaleError("bad-image", f"expected 2-D bit array, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise CoreScaleError("bad-image", "binary image may only hold 0/1")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def to_gray(self) -> GrayImage:
        return GrayImage(self.bits.astype(np.float64))


@dataclass(frozen=True)
class SsimParams:
    """Structural-similarity parameters.

    ``window`` is "global" (one evaluation over whole images) or "gaussian"
    (11x11 sigma-1.5 local windows over the valid region, mean of the local
    values).  ``dynamic_range`` is the L in C1 = (k1*L)^2, C2 = (k2*L)^2.
    """

    window: str = "gaussian"
    dynamic_range: float = 1.0
    k1: float = 0.01
    k2: float = 0.03
    window_size: int = 11
    sigma: float = 1.5

    def __post_init__(self):
        if self.window not in ("global", "gaussian"):
            raise CoreScaleError("bad-ssim-window", f"unknown SSIM window {self.window!r}")
        if self.dynamic_range <= 0:
            raise CoreScaleError("bad-ssim-range", "dynamic_range must be > 0")

    @property
    def c1(self) -> float:
        return (self.k1 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (self.k2 * self.dynamic_range) ** 2


@dataclass(frozen=True)
class QualityMetrics:
    mse: float
    psnr_db: float
    ssim: float

    def __post_init__(self):
        if (self.mse == 0.0) != (self.psnr_db == PSNR_INF):
            raise CoreScaleError("bad-metrics", "mse == 0 must coincide with infinite PSNR")


def zscore(img: GrayImage) -> GrayImage:
    """Normalize to zero mean and unit population standard deviation."""
    arr = img.pixels
    if arr.size < 2:
        raise CoreScaleError("degenerate-image", "z-score needs at least 2 pixels")
    mu = arr.mean()
    sigma = arr.std()  # population (divide-by-N)
    if sigma == 0.0:
        raise CoreScaleError("degenerate-zero-variance", "constant image has no z-score")
    return img.with_pixels((arr - mu) / sigma)


def binarize(img: GrayImage, tau: float) -> BinaryImage:
    """1 where pixel >= tau, else 0 (ties go to 1)."""
    return BinaryImage((img.pixels >= tau).astype(np.uint8), threshold_used=tau)


def _check_dims(a: GrayImage, b: GrayImage) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise CoreScaleError(
            "dim-mismatch", f"images differ in size: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def mse(a: GrayImage, b: GrayImage) -> float:
    _check_dims(a, b)
    diff = a.pixels - b.pixels
    return float(np.mean(diff * diff))


def psnr(a: GrayImage, b: GrayImage, max_i: float) -> float:
    """10*log10(max_i^2 / MSE); +inf sentinel when the images are identical."""
    if max_i <= 0:
        raise CoreScaleError("bad-max-i", f"max_i must be > 0, got {max_i}")
    err = mse(a, b)
    if err == 0.0:
        return PSNR_INF
    return 10.0 * math.log10(max_i * max_i / err)


def _gaussian_kernel_1d(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    x = np.arange(size, dtype=np.float64) - half
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _windowed_valid(arr: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Separable weighted local mean, cropped to the fully-covered region."""
    half = (len(g) - 1) // 2
    tmp = correlate1d(arr, g, axis=0, mode="constant")
    out = correlate1d(tmp, g, axis=1, mode="constant")
    return out[half : arr.shape[0] - half, half : arr.shape[1] - half]


def ssim(a: GrayImage, b: GrayImage, p: SsimParams) -> float:
    """Structural similarity per the luminance/contrast/structure product.

    Global mode evaluates the formula once over the whole images with
    population statistics; gaussian mode averages local values computed
    with an 11x11 sigma-1.5 window over the valid (fully covered) region.
    """
    _check_dims(a, b)
    x, y = a.pixels, b.pixels
    c1, c2 = p.c1, p.c2
    if p.window == "global":
        mx, my = x.mean(), y.mean()
        vx, vy = x.var(), y.var()
        cxy = float(np.mean((x - mx) * (y - my)))
        return float(
            ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        )
    if a.width < p.window_size or a.height < p.window_size:
        raise CoreScaleError(
            "image-too-small", f"gaussian SSIM needs dims >= {p.window_size}, got {a.width}x{a.height}"
        )
    g = _gaussian_kernel_1d(p.window_size, p.sigma)
    mx = _windowed_valid(x, g)
    my = _windowed_valid(y, g)
    vx = _windowed_valid(x * x, g) - mx * mx
    vy = _windowed_valid(y * y, g) - my * my
    cxy = _windowed_valid(x * y, g) - mx * my
    local = ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    return float(local.mean())


def increase_ratio(pre_val: float, post_val: float) -> float:
    """Relative percentage change, 100*(post - pre)/pre; equal values give 0."""
    if pre_val == post_val:
        return 0.0  # covers the +inf/+inf case from perfect reconstructions
    if pre_val == 0.0:
        raise CoreScaleError("zero-baseline", "increase ratio undefined for a zero baseline")
    return 100.0 * (post_val - pre_val) / pre_val


def quality(a: GrayImage, b: GrayImage, max_i: float, ssim_params: SsimParams | None = None) -> QualityMetrics:
    """Bundle MSE/PSNR/SSIM of ``a`` against reference ``b``.

    SSIM defaults to the gaussian window with dynamic range ``max_i``,
    falling back to global mode for images smaller than the window.
    """
    if ssim_params is None:
        small = a.width < 11 or a.height < 11
        ssim_params = SsimParams(window="global" if small else "gaussian", dynamic_range=max_i)
    return QualityMetrics(mse=mse(a, b), psnr_db=psnr(a, b, max_i), ssim=ssim(a, b, ssim_params))
