"""Method-selection experiments over corpora of paired images.

Given HR/LR pairs (real, or synthesized), the harness coarsens each HR
crop with every candidate method and scores it against the real LR crop
(``coarsen_eval``), or refines each LR crop against the real HR crop
(``refine_eval``).  Reports are ranked, exported as CSV/JSON, and can be
forged into paired-patch training manifests for the SR trainer.

PSNR here always uses the peak-to-peak range of the reference crop as the
dynamic range ("reference-ptp" policy), which stays meaningful after
z-score normalization; the policy string is recorded in every report.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import PSNR_INF, QualityMetrics, binarize, quality, zscore
from .errors import CoreScaleError
from .image import GrayImage, Rect, crop, load_image, save_image
from .registration import PairAlignment, pair_images
from .resample import ResampleMethod, coarsen, refine

MAX_I_POLICY = "reference-ptp"
MANIFEST_VERSION = "corescale-manifest/1"


@dataclass(frozen=True)
class PairedSample:
    """An aligned HR/LR pair plus provenance tags."""

    sample_id: str
    hr: GrayImage
    lr: GrayImage
    factor: int
    alignment: PairAlignment
    region_tag: str = ""
    device_tag: str = ""

    def __post_init__(self):
        self.alignment.hr_rect.validate_within(self.hr)
        self.alignment.lr_rect.validate_within(self.lr)
        if self.alignment.factor != self.factor:
            raise CoreScaleError("bad-sample", "alignment factor disagrees with sample factor")

    def hr_crop(self) -> GrayImage:
        return crop(self.hr, self.alignment.hr_rect)

    def lr_crop(self) -> GrayImage:
        return crop(self.lr, self.alignment.lr_rect)


def full_alignment(hr: GrayImage, lr: GrayImage, factor: int, score: float = 1.0) -> PairAlignment:
    """Trivial alignment covering all of ``lr`` at offset (0, 0)."""
    return PairAlignment(
        offset_x=0,
        offset_y=0,
        score=score,
        hr_rect=Rect(0, 0, lr.width * factor, lr.height * factor),
        lr_rect=Rect(0, 0, lr.width, lr.height),
        factor=factor,
    )


@dataclass(frozen=True)
class ReportRow:
    method: str
    factor: int
    sample_id: str
    direction: str  # "coarsen" | "refine"
    metrics: QualityMetrics


@dataclass(frozen=True)
class QualityReport:
    rows: tuple[ReportRow, ...]
    max_i_policy: str = MAX_I_POLICY

    def methods(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if r.method not in seen:
                seen.append(r.method)
        return seen

    def mean_metric(self, method_name: str, metric: str) -> float:
        vals = [getattr(r.metrics, metric) for r in self.rows if r.method == method_name]
        if not vals:
            raise CoreScaleError("empty-report", f"no rows for method {method_name}")
        return float(np.mean(vals))


def _eval(samples, methods, direction, antialias=True) -> QualityReport:
    if not methods:
        raise CoreScaleError("empty-methods", "method list must be non-empty")
    if not samples:
        raise CoreScaleError("empty-corpus", "sample list must be non-empty")
    rows = []
    for sample in samples:
        hr_crop = sample.hr_crop()
        lr_crop = sample.lr_crop()
        for m in methods:
            if direction == "coarsen":
                generated, reference = coarsen(hr_crop, sample.factor, m, antialias=antialias), lr_crop
            else:
                generated, reference = refine(lr_crop, sample.factor, m), hr_crop
            max_i = float(np.ptp(reference.pixels)) or 1.0
            rows.append(
                ReportRow(
                    method=m.name,
                    factor=sample.factor,
                    sample_id=sample.sample_id,
                    direction=direction,
                    metrics=quality(generated, reference, max_i),
                )
            )
    return QualityReport(rows=tuple(rows))


def coarsen_eval(
    samples: list[PairedSample], methods: list[ResampleMethod], antialias: bool = True
) -> QualityReport:
    """Score generated LR images (coarsened HR crops) against the real LR crops.

    ``antialias=False`` evaluates the plain interpolation formulas instead
    of the stretched-kernel default (relevant when the corpus was captured
    by a fixed-probe device).
    """
    return _eval(samples, methods, "coarsen", antialias=antialias)


def refine_eval(samples: list[PairedSample], methods: list[ResampleMethod]) -> QualityReport:
    """Score generated HR-sized images (refined LR crops) against the real HR crops."""
    return _eval(samples, methods, "refine")


def rank_methods(report: QualityReport, key: str = "psnr") -> list[str]:
    """Order methods by mean metric, best first.

    ``key`` is "psnr", "ssim", or "rank_mean" (average of the two rank
    positions).  Ties break by the other metric, then method name;
    infinite PSNR rows participate as maximal.
    """
    names = report.methods()
    if not names:
        raise CoreScaleError("empty-report", "cannot rank an empty report")
    psnr_mean = {n: report.mean_metric(n, "psnr_db") for n in names}
    ssim_mean = {n: report.mean_metric(n, "ssim") for n in names}
    by_psnr = sorted(names, key=lambda n: (-psnr_mean[n], -ssim_mean[n], n))
    by_ssim = sorted(names, key=lambda n: (-ssim_mean[n], -psnr_mean[n], n))
    if key == "psnr":
        return by_psnr
    if key == "ssim":
        return by_ssim
    if key == "rank_mean":
        avg = {n: (by_psnr.index(n) + by_ssim.index(n)) / 2.0 for n in names}
        return sorted(names, key=lambda n: (avg[n], n))
    raise CoreScaleError("bad-rank-key", f"unknown ranking key {key!r}")


def _fmt(value: float) -> str:
    return "inf" if value == PSNR_INF else repr(value)


def report_to_csv(report: QualityReport) -> str:
    lines = ["method,factor,sample,direction,mse,psnr_db,ssim"]
    for r in report.rows:
        m = r.metrics
        lines.append(f"{r.method},{r.factor},{r.sample_id},{r.direction},{m.mse!r},{_fmt(m.psnr_db)},{m.ssim!r}")
    return "\n".join(lines) + "\n"


def report_to_json(report: QualityReport) -> str:
    payload = {
        "max_i_policy": report.max_i_policy,
        "rows": [
            {
                "method": r.method,
                "factor": r.factor,
                "sample": r.sample_id,
                "direction": r.direction,
                "mse": r.metrics.mse,
                "psnr_db": "inf" if r.metrics.psnr_db == PSNR_INF else r.metrics.psnr_db,
                "ssim": r.metrics.ssim,
            }
            for r in report.rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def export_report(report: QualityReport, fmt: str, path: str) -> None:
    """Write the report as CSV or JSON; repeated exports are byte-identical."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise CoreScaleError("bad-format", f"unknown report format {fmt!r}")
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Corpus loading


def load_corpus(path: str) -> list[dict]:
    """Parse a corpus description file: a JSON list of
    {"hr": path, "lr": path, "factor": int, "region": str?, "device": str?, "id": str?}.
    Relative image paths are resolved against the corpus file's directory.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CoreScaleError("bad-corpus", f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise CoreScaleError("bad-corpus", "corpus must be a non-empty JSON list")
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for i, item in enumerate(raw):
        try:
            entry = {
                "id": str(item.get("id", f"sample-{i:03d}")),
                "hr": os.path.join(base, item["hr"]),
                "lr": os.path.join(base, item["lr"]),
                "factor": int(item["factor"]),
                "region": str(item.get("region", "")),
                "device": str(item.get("device", "")),
            }
        except (KeyError, TypeError, AttributeError) as exc:
            raise CoreScaleError("bad-corpus", f"corpus entry {i} is malformed: {exc}") from exc
        entries.append(entry)
    return entries


def prepare_samples(
    entries: list[dict],
    pair_method: ResampleMethod,
    normalize: bool = True,
    zero_mean: bool = False,
    central_fraction: float | None = None,
    score_floor: float = 0.5,
    threads: int = 1,
) -> list[PairedSample]:
    """Load, optionally z-score, and align every corpus entry."""

    def build(entry: dict) -> PairedSample:
        hr = load_image(entry["hr"])
        lr = load_image(entry["lr"])
        if normalize:
            hr, lr = zscore(hr), zscore(lr)
        alignment = pair_images(
            hr,
            lr,
            entry["factor"],
            pair_method,
            zero_mean=zero_mean,
            central_fraction=central_fraction,
            score_floor=score_floor,
        )
        return PairedSample(
            sample_id=entry["id"],
            hr=hr,
            lr=lr,
            factor=entry["factor"],
            alignment=alignment,
            region_tag=entry["region"],
            device_tag=entry["device"],
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build, entries))  # order preserved: canonical
    return [build(e) for e in entries]


# ---------------------------------------------------------------------------
# Training-set manifests


@dataclass(frozen=True)
class DatasetManifest:
    """Description of paired HR-binary / LR-refined patches for SR training."""

    version: str
    factor: int
    patch_size: int
    stride: int
    tau: float
    method: str
    entries: tuple[dict, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "factor": self.factor,
            "patch_size": self.patch_size,
            "stride": self.stride,
            "tau": self.tau,
            "method": self.method,
            "entries": list(self.entries),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def build_manifest(
    samples: list[PairedSample],
    m: ResampleMethod,
    patch_size: int,
    stride: int,
    tau: float,
    out_dir: str,
    include_16x: bool = False,
) -> DatasetManifest:
    """Forge an SR training set: binary HR targets and continuous LR-refined inputs.

    Per sample the aligned HR crop is z-scored and thresholded at ``tau``
    into the binary target.  The input mirrors reconstruction-time data:
    the continuous crop is coarsened, the low-resolution result is
    segmented at the same shared threshold, and that binary image is
    refined back to size, leaving fractional values along phase edges
    (clipped to [0, 1]).  The residual a trainer regresses (target minus
    input) is therefore zero-mean and concentrated at edges, and a real
    low-resolution image segmented at the same threshold feeds the exact
    same operator chain.  Both sides are tiled into ``patch_size`` squares
    at the given stride and written as 16-bit PGM files under ``out_dir``.
    16x samples are excluded unless ``include_16x`` is set.
    """
    if stride < 1:
        raise CoreScaleError("bad-stride", f"stride must be >= 1, got {stride}")
    if patch_size < 1:
        raise CoreScaleError("bad-patch", f"patch_size must be >= 1, got {patch_size}")
    kept = [s for s in samples if include_16x or s.factor != 16]
    if not kept:
        raise CoreScaleError("empty-corpus", "no samples left after the 16x exclusion")
    factors = sorted({s.factor for s in kept})
    if len(factors) != 1:
        raise CoreScaleError("mixed-factors", f"one manifest per factor; corpus has {factors}")
    factor = factors[0]

    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for sample in kept:
        zhr = zscore(sample.hr_crop())
        if patch_size > zhr.width or patch_size > zhr.height:
            raise CoreScaleError(
                "patch-too-large", f"patch {patch_size} exceeds crop {zhr.width}x{zhr.height}"
            )
        hr_bin = binarize(zhr, tau).bits.astype(np.float64)
        lr_bin = binarize(coarsen(zhr, factor, m), tau).bits.astype(np.float64)
        degraded = refine(GrayImage(lr_bin), factor, m)
        lr_store = np.clip(degraded.pixels, 0.0, 1.0)
        for y0 in range(0, zhr.height - patch_size + 1, stride):
            for x0 in range(0, zhr.width - patch_size + 1, stride):
                hr_patch = GrayImage(hr_bin[y0 : y0 + patch_size, x0 : x0 + patch_size])
                lr_patch = GrayImage(lr_store[y0 : y0 + patch_size, x0 : x0 + patch_size])
                hr_name = f"{sample.sample_id}_y{y0:04d}_x{x0:04d}_hr.pgm"
                lr_name = f"{sample.sample_id}_y{y0:04d}_x{x0:04d}_lr.pgm"
                save_image(hr_patch, os.path.join(out_dir, hr_name), bit_depth=16)
                save_image(lr_patch, os.path.join(out_dir, lr_name), bit_depth=16)
                entries.append({"hr_patch": hr_name, "lr_patch": lr_name, "sample": sample.sample_id})

    manifest = DatasetManifest(
        version=MANIFEST_VERSION,
        factor=factor,
        patch_size=patch_size,
        stride=stride,
        tau=tau,
        method=m.name,
        entries=tuple(entries),
    )
    try:
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
            fh.write(manifest.to_json())
    except OSError as exc:
        raise CoreScaleError("io-error", f"cannot write manifest: {exc}") from exc
    return manifest
