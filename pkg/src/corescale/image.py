"""Grayscale image container, PGM/PNG I/O, cropping and quantization.

Pixels live in [0, 1] as 64-bit reals for the whole pipeline; quantization
to 8/16-bit integer samples happens only when a file is written.  Supported
file formats are Netpbm PGM (P2 ascii, P5 binary, maxval up to 65535) and
single-channel PNG (8 or 16 bit, no alpha, no interlacing).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

from .errors import CoreScaleError


@dataclass(frozen=True)
class GrayImage:
    """Immutable single-channel raster.

    Attributes:
        pixels: (height, width) float64 array, marked read-only.
        pixel_pitch: optional physical length per pixel (nanometres).
        source_tag: optional free-form provenance string.
    """

    pixels: np.ndarray
    pixel_pitch: float | None = None
    source_tag: str | None = None

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise CoreScaleError("bad-image", f"expected 2-D pixel array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise CoreScaleError("bad-image", "pixel values must be finite")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def with_pixels(self, pixels: np.ndarray, pixel_pitch: float | None = None) -> "GrayImage":
        """New image with the same provenance but different pixels/pitch."""
        pitch = self.pixel_pitch if pixel_pitch is None else pixel_pitch
        return GrayImage(pixels, pixel_pitch=pitch, source_tag=self.source_tag)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned crop region: top-left corner plus extents."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.x0 < 0 or self.y0 < 0 or self.w < 1 or self.h < 1:
            raise CoreScaleError("bad-rect", f"invalid rect {(self.x0, self.y0, self.w, self.h)}")

    def validate_within(self, img: GrayImage) -> None:
        if self.x0 + self.w > img.width or self.y0 + self.h > img.height:
            raise CoreScaleError(
                "rect-out-of-bounds",
                f"rect {(self.x0, self.y0, self.w, self.h)} exceeds image {img.width}x{img.height}",
            )

    def scaled(self, factor: int) -> "Rect":
        return Rect(self.x0 * factor, self.y0 * factor, self.w * factor, self.h * factor)


def crop(img: GrayImage, r: Rect) -> GrayImage:
    """Extract the sub-image under ``r``; pixel_pitch is inherited."""
    r.validate_within(img)
    return img.with_pixels(img.pixels[r.y0 : r.y0 + r.h, r.x0 : r.x0 + r.w].copy())


# ---------------------------------------------------------------------------
# PGM


_PGM_TOKEN = re.compile(rb"^\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pgm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Read `count` whitespace/comment-separated integer tokens, return (values, offset)."""
    values = []
    pos = 0
    for _ in range(count):
        m = _PGM_TOKEN.match(data[pos:])
        if not m:
            raise CoreScaleError("bad-pgm", "truncated PGM header")
        tok = m.group(1)
        try:
            values.append(int(tok))
        except ValueError:
            raise CoreScaleError("bad-pgm", f"non-numeric PGM header token {tok!r}") from None
        pos += m.end(1)
    return values, pos


def _load_pgm(data: bytes, magic: bytes) -> np.ndarray:
    (w, h, maxval), pos = _pgm_tokens(data[2:], 3)
    pos += 2
    if w < 1 or h < 1:
        raise CoreScaleError("bad-pgm", f"invalid dimensions {w}x{h}")
    if not (0 < maxval < 65536):
        raise CoreScaleError("bad-pgm", f"invalid maxval {maxval}")
    n = w * h
    if magic == b"P2":
        try:
            samples = np.array(data[pos:].split()[:n], dtype=np.uint32)
        except ValueError:
            raise CoreScaleError("bad-pgm", "non-numeric P2 sample") from None
    else:  # P5: exactly one whitespace byte after maxval, then raw samples
        body = data[pos + 1 :]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = n * dtype.itemsize
        if len(body) < need:
            raise CoreScaleError("bad-pgm", f"P5 body holds {len(body)} bytes, need {need}")
        samples = np.frombuffer(body[:need], dtype=dtype).astype(np.uint32)
    if samples.size != n:
        raise CoreScaleError("bad-pgm", f"P2 body holds {samples.size} samples, need {n}")
    if samples.max(initial=0) > maxval:
        raise CoreScaleError("bad-pgm", "sample exceeds declared maxval")
    return samples.reshape(h, w).astype(np.float64) / float(maxval)


def _save_pgm(path: str, samples: np.ndarray, maxval: int, ascii_format: bool) -> None:
    h, w = samples.shape
    header = f"P{'2' if ascii_format else '5'}\n{w} {h}\n{maxval}\n".encode("ascii")
    if ascii_format:
        body = "\n".join(" ".join(str(v) for v in row) for row in samples.tolist())
        payload = header + body.encode("ascii") + b"\n"
    else:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        payload = header + samples.astype(dtype).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# PNG (via Pillow; grayscale only)


def _load_png(path: str) -> np.ndarray:
    try:
        with PILImage.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                return np.asarray(im, dtype=np.float64) / 255.0
            if mode in ("I", "I;16", "I;16B"):
                arr = np.asarray(im, dtype=np.float64)
                if arr.max(initial=0.0) > 65535.0:
                    raise CoreScaleError("bad-png", "integer PNG sample exceeds 16-bit range")
                return arr / 65535.0
            raise CoreScaleError("unsupported-format", f"unsupported channel count (PNG mode {mode})")
    except CoreScaleError:
        raise
    except Exception as exc:
        raise CoreScaleError("bad-png", f"cannot decode PNG {path}: {exc}") from exc


def _save_png(path: str, samples: np.ndarray, bit_depth: int) -> None:
    if bit_depth == 8:
        im = PILImage.fromarray(samples.astype(np.uint8), mode="L")
    else:
        im = PILImage.fromarray(samples.astype(np.uint16))  # infers 16-bit grayscale
    try:
        im.save(path, format="PNG")
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Public I/O


def load_image(path: str, pixel_pitch: float | None = None) -> GrayImage:
    """Load a PGM (P2/P5) or single-channel PNG as a [0, 1]-scaled image.

    Samples are divided by the format's declared maximum (PGM maxval, or
    255/65535 for PNG).  Multi-channel PNGs are rejected.
    """
    try:
        with open(path, "rb") as fh:
            head = fh.read(8)
            data = head + fh.read()
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot read {path}: {exc}") from exc

    if head[:2] in (b"P2", b"P5"):
        pixels = _load_pgm(data, head[:2])
    elif head == b"\x89PNG\r\n\x1a\n":
        pixels = _load_png(path)
    else:
        raise CoreScaleError("unsupported-format", f"{path} is neither PGM P2/P5 nor PNG")
    return GrayImage(pixels, pixel_pitch=pixel_pitch, source_tag=path)


def quantize(pixels: np.ndarray, bit_depth: int) -> np.ndarray:
    """Clamp to [0, 1] and quantize round-half-up to 2^bit_depth - 1 levels."""
    if bit_depth not in (8, 16):
        raise CoreScaleError("bad-bit-depth", f"bit_depth must be 8 or 16, got {bit_depth}")
    maxval = (1 << bit_depth) - 1
    clamped = np.clip(pixels, 0.0, 1.0)
    return np.floor(clamped * maxval + 0.5).astype(np.uint32)


def save_image(img: GrayImage, path: str, bit_depth: int = 8, pgm_ascii: bool = False) -> None:
    """Write the image as PGM (``.pgm``) or PNG (``.png``) by extension.

    Values are clamped to [0, 1] and quantized round-half-up, so a re-saved
    load round-trips bit-identically on already-quantized data.
    """
    samples = quantize(img.pixels, bit_depth)
    maxval = (1 << bit_depth) - 1
    lower = path.lower()
    if lower.endswith(".pgm"):
        _save_pgm(path, samples, maxval, pgm_ascii)
    elif lower.endswith(".png"):
        _save_png(path, samples, bit_depth)
    else:
        raise CoreScaleError("unsupported-format", f"cannot infer format from {path}")
