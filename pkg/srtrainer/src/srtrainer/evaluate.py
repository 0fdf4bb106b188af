"""Before/after evaluation of a trained reconstruction model.

For every (lr, hr_bin) pair the baseline is the thresholded plain
refinement; the candidate is the residual-corrected reconstruction.
PSNR/SSIM use dynamic range 1 (binary targets) and the report carries
relative percentage changes, aggregated as means.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .metrics import PSNR_INF, increase_ratio, psnr, ssim
from .reconstruct import reconstruct
from .resample import refine
from .training import ModelArtifact


class EvaluationError(Exception):
    pass


@dataclass(frozen=True)
class EvalPair:
    sample_id: str
    lr: np.ndarray       # the real LR capture segmented at the shared threshold
    hr_bin: np.ndarray   # binary ground truth at HR size
    factor: int


@dataclass(frozen=True)
class EvalRow:
    sample_id: str
    factor: int
    pre_psnr: float
    post_psnr: float
    psnr_increase_pct: float
    pre_ssim: float
    post_ssim: float
    ssim_increase_pct: float


@dataclass(frozen=True)
class SrReport:
    rows: tuple[EvalRow, ...]
    method: str
    trained_method: str
    method_matched: bool
    tau: float

    @property
    def mean_psnr_increase_pct(self) -> float:
        return float(np.mean([r.psnr_increase_pct for r in self.rows]))

    @property
    def mean_ssim_increase_pct(self) -> float:
        return float(np.mean([r.ssim_increase_pct for r in self.rows]))

    def to_dict(self) -> dict:
        def fmt(v):
            return "inf" if v == PSNR_INF else v

        return {
            "method": self.method,
            "trained_method": self.trained_method,
            "method_matched": self.method_matched,
            "tau": self.tau,
            "mean_psnr_increase_pct": self.mean_psnr_increase_pct,
            "mean_ssim_increase_pct": self.mean_ssim_increase_pct,
            "rows": [
                {
                    "sample": r.sample_id,
                    "factor": r.factor,
                    "pre_psnr": fmt(r.pre_psnr),
                    "post_psnr": fmt(r.post_psnr),
                    "psnr_increase_pct": r.psnr_increase_pct,
                    "pre_ssim": r.pre_ssim,
                    "post_ssim": r.post_ssim,
                    "ssim_increase_pct": r.ssim_increase_pct,
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["sample,factor,pre_psnr,post_psnr,psnr_increase_pct,pre_ssim,post_ssim,ssim_increase_pct"]
        for r in self.rows:
            pre = "inf" if r.pre_psnr == PSNR_INF else repr(r.pre_psnr)
            post = "inf" if r.post_psnr == PSNR_INF else repr(r.post_psnr)
            lines.append(
                f"{r.sample_id},{r.factor},{pre},{post},{r.psnr_increase_pct!r},"
                f"{r.pre_ssim!r},{r.post_ssim!r},{r.ssim_increase_pct!r}"
            )
        return "\n".join(lines) + "\n"


def evaluate(artifact: ModelArtifact, eval_pairs: list[EvalPair], method: str, tau: float = 0.5) -> SrReport:
    """Score reconstruction against the plain-refinement baseline per pair."""
    if not eval_pairs:
        raise EvaluationError("evaluation set must be non-empty")
    rows = []
    for pair in eval_pairs:
        want_h = pair.lr.shape[0] * pair.factor
        want_w = pair.lr.shape[1] * pair.factor
        if pair.hr_bin.shape != (want_h, want_w):
            raise EvaluationError(
                f"{pair.sample_id}: hr_bin is {pair.hr_bin.shape}, expected {(want_h, want_w)}"
            )
        truth = pair.hr_bin.astype(np.float64)
        baseline = (refine(pair.lr, pair.factor, method) >= tau).astype(np.float64)
        restored = reconstruct(artifact, pair.lr, pair.factor, method, tau).astype(np.float64)
        pre_p, post_p = psnr(baseline, truth), psnr(restored, truth)
        pre_s, post_s = ssim(baseline, truth), ssim(restored, truth)
        rows.append(
            EvalRow(
                sample_id=pair.sample_id,
                factor=pair.factor,
                pre_psnr=pre_p,
                post_psnr=post_p,
                psnr_increase_pct=increase_ratio(pre_p, post_p),
                pre_ssim=pre_s,
                post_ssim=post_s,
                ssim_increase_pct=increase_ratio(pre_s, post_s),
            )
        )
    return SrReport(
        rows=tuple(rows),
        method=method,
        trained_method=artifact.method,
        method_matched=(method == artifact.method),
        tau=tau,
    )
