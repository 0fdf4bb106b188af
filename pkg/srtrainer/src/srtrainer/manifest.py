"""Loader for ``corescale-manifest/1`` training-set manifests."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .pgm import read_pgm

SUPPORTED_VERSION = "corescale-manifest/1"


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class Manifest:
    """Paired-patch training set: binary HR targets, continuous LR-refined inputs.

    The LR side is the refinement of a low-resolution capture segmented at
    the shared threshold, so its values live in [0, 1] with fractional
    values along phase edges and the residual (target minus input) is
    near-zero-mean.  ``tau`` records the z-score threshold used on both
    sides; real low-resolution images must be segmented with the same
    threshold before reconstruction.
    """

    version: str
    factor: int
    patch_size: int
    stride: int
    tau: float
    method: str
    entries: tuple[dict, ...]
    base_dir: str
    fingerprint: str  # sha256 of the manifest file bytes

    def patch_pair(self, entry: dict) -> tuple[np.ndarray, np.ndarray]:
        """(hr_bin, lr_refined) as float64 arrays scaled to [0, 1]."""
        hr = read_pgm(os.path.join(self.base_dir, entry["hr_patch"]))
        lr = read_pgm(os.path.join(self.base_dir, entry["lr_patch"]))
        return hr, lr

    def load_pairs(self, entries=None) -> tuple[np.ndarray, np.ndarray]:
        """Stacked (N, H, W) arrays of HR targets and LR-refined inputs."""
        chosen = self.entries if entries is None else tuple(entries)
        if not chosen:
            raise ManifestError("no entries to load")
        hrs, lrs = [], []
        for entry in chosen:
            hr, lr = self.patch_pair(entry)
            hrs.append(hr)
            lrs.append(lr)
        return np.stack(hrs), np.stack(lrs)


def load_manifest(path: str) -> Manifest:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
        doc = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot load manifest {path}: {exc}") from exc
    if doc.get("version") != SUPPORTED_VERSION:
        raise ManifestError(f"unsupported manifest version {doc.get('version')!r}")
    for key in ("factor", "patch_size", "stride", "tau", "method", "entries"):
        if key not in doc:
            raise ManifestError(f"manifest missing field {key!r}")
    return Manifest(
        version=doc["version"],
        factor=int(doc["factor"]),
        patch_size=int(doc["patch_size"]),
        stride=int(doc["stride"]),
        tau=float(doc["tau"]),
        method=str(doc["method"]),
        entries=tuple(doc["entries"]),
        base_dir=os.path.dirname(os.path.abspath(path)),
        fingerprint=hashlib.sha256(raw).hexdigest(),
    )


def split_entries(manifest: Manifest, holdout_every: int = 5) -> tuple[tuple[dict, ...], tuple[dict, ...]]:
    """Deterministic train/held-out split: every Nth entry is held out."""
    if holdout_every < 2:
        raise ManifestError("holdout_every must be >= 2")
    train, held = [], []
    for i, entry in enumerate(manifest.entries):
        (held if i % holdout_every == holdout_every - 1 else train).append(entry)
    return tuple(train), tuple(held)
