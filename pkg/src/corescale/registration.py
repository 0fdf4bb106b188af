"""Pairing of different-pitch images by normalized cross-correlation.

The high-resolution image is coarsened to the low-resolution pitch, a
central template is cut from it, and the template is slid over the
low-resolution image.  The correlation surface is the plain normalized
cross-correlation ratio by default; the zero-mean variant subtracts the
template and window means first and lives in [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import CoreScaleError
from .image import GrayImage, Rect
from .resample import ResampleMethod, coarsen

DEFAULT_SCORE_FLOOR = 0.5


@dataclass(frozen=True)
class PairAlignment:
    """NCC peak linking an HR/LR pair: offsets, score and matched crops."""

    offset_x: int
    offset_y: int
    score: float
    hr_rect: Rect
    lr_rect: Rect
    factor: int

    def __post_init__(self):
        if self.hr_rect.w != self.lr_rect.w * self.factor or self.hr_rect.h != self.lr_rect.h * self.factor:
            raise CoreScaleError("bad-alignment", "hr_rect dims must be lr_rect dims times the pitch factor")

    def to_dict(self) -> dict:
        return {
            "offset_x": self.offset_x,
            "offset_y": self.offset_y,
            "score": self.score,
            "hr_rect": [self.hr_rect.x0, self.hr_rect.y0, self.hr_rect.w, self.hr_rect.h],
            "lr_rect": [self.lr_rect.x0, self.lr_rect.y0, self.lr_rect.w, self.lr_rect.h],
            "factor": self.factor,
        }


def ncc_map(template: GrayImage, search: GrayImage, zero_mean: bool = False) -> np.ndarray:
    """Correlation surface of the template at every offset in the search image.

    Returns an array of shape (search.h - template.h + 1,
    search.w - template.w + 1); entry [y, x] is the score with the template's
    top-left corner at (x, y).  Offsets where a window has zero denominator
    are flagged with 0.0 (never NaN).
    """
    t = template.pixels
    s = search.pixels
    if t.shape[0] > s.shape[0] or t.shape[1] > s.shape[1]:
        raise CoreScaleError("template-too-large", "template must not exceed the search image")
    windows = sliding_window_view(s, t.shape)
    if zero_mean:
        t0 = t - t.mean()
        t_energy = float(np.einsum("ij,ij->", t0, t0))
        if t_energy == 0.0:
            raise CoreScaleError("zero-template-energy", "zero-variance template in zero-mean mode")
        # window-mean subtraction cancels in the numerator because t0 sums to 0
        num = np.einsum("xyij,ij->xy", windows, t0)
        win_sum = np.einsum("xyij->xy", windows)
        win_sq = np.einsum("xyij,xyij->xy", windows, windows)
        win_var = np.maximum(win_sq - win_sum * win_sum / t.size, 0.0)
        den = np.sqrt(t_energy * win_var)
    else:
        t_energy = float(np.einsum("ij,ij->", t, t))
        if t_energy == 0.0:
            raise CoreScaleError("zero-template-energy", "template has zero energy")
        num = np.einsum("xyij,ij->xy", windows, t)
        win_sq = np.einsum("xyij,xyij->xy", windows, windows)
        den = np.sqrt(t_energy * win_sq)
    out = np.zeros_like(num)
    ok = den > 0.0
    out[ok] = num[ok] / den[ok]
    return out


def pair_images(
    hr: GrayImage,
    lr: GrayImage,
    factor: int,
    m: ResampleMethod,
    zero_mean: bool = False,
    central_fraction: float | None = None,
    score_floor: float = DEFAULT_SCORE_FLOOR,
) -> PairAlignment:
    """Locate the LR region matching the coarsened HR image.

    The template is the full coarsened HR image when it fits inside the LR
    image, otherwise (or when ``central_fraction`` is given) a central crop
    of it.  A peak below ``score_floor`` raises with the best score reported.
    """
    if factor < 1:
        raise CoreScaleError("bad-factor", f"factor must be >= 1, got {factor}")
    coarse = coarsen(hr, factor, m)
    if central_fraction is not None:
        if not (0.0 < central_fraction <= 1.0):
            raise CoreScaleError("bad-fraction", f"central_fraction must be in (0, 1], got {central_fraction}")
        tw = max(1, int(coarse.width * central_fraction))
        th = max(1, int(coarse.height * central_fraction))
    else:
        tw = min(coarse.width, lr.width)
        th = min(coarse.height, lr.height)
    tx0 = (coarse.width - tw) // 2
    ty0 = (coarse.height - th) // 2
    template = coarse.with_pixels(coarse.pixels[ty0 : ty0 + th, tx0 : tx0 + tw].copy())

    surface = ncc_map(template, lr, zero_mean=zero_mean)
    peak = int(np.argmax(surface))
    py, px = divmod(peak, surface.shape[1])
    score = float(surface[py, px])
    if score < score_floor:
        raise CoreScaleError(
            "pairing-failed", f"best NCC score {score:.6f} is below the floor {score_floor:.6f}"
        )
    lr_rect = Rect(px, py, tw, th)
    hr_rect = Rect(tx0 * factor, ty0 * factor, tw * factor, th * factor)
    return PairAlignment(offset_x=px, offset_y=py, score=score, hr_rect=hr_rect, lr_rect=lr_rect, factor=factor)
