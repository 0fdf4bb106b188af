"""Seeded, reproducible residual training.

The regression target for every patch pair is the difference between the
binary HR target and the continuous LR-refined input; the loss is plain
mean squared error on the predicted residual.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np
import torch

from .manifest import Manifest, ManifestError
from .models import ArchSpec, build_model


class TrainingError(Exception):
    pass


@dataclass
class ModelArtifact:
    """A trained model plus everything needed to reproduce or reload it."""

    arch: ArchSpec
    model: torch.nn.Module
    seed: int
    epochs: int
    learning_rate: float
    batch_size: int
    manifest_fingerprint: str
    method: str  # generation method of the training manifest

    def metadata(self) -> dict:
        return {
            "arch": self.arch.to_dict(),
            "seed": self.seed,
            "epochs": self.epochs,
            "optimizer": "adam",
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "manifest_fingerprint": self.manifest_fingerprint,
            "method": self.method,
            "torch_version": torch.__version__,
        }


def train(
    manifest: Manifest,
    arch: ArchSpec,
    epochs: int,
    seed: int,
    learning_rate: float = 1e-3,
    batch_size: int = 16,
    entries=None,
    binary_targets: bool = True,
) -> ModelArtifact:
    """Fit the residual network on the manifest's patch pairs.

    ``entries`` restricts training to a subset (e.g. a train split).
    ``binary_targets=False`` accepts continuous HR targets (grayscale
    training) instead of asserting segmentation targets.
    """
    if epochs < 0:
        raise TrainingError(f"epochs must be >= 0, got {epochs}")
    if manifest.patch_size != arch.patch_size:
        raise TrainingError(
            f"manifest patches are {manifest.patch_size}, {arch.kind} expects {arch.patch_size}"
        )
    try:
        hr, lr = manifest.load_pairs(entries)
    except ManifestError as exc:
        raise TrainingError(str(exc)) from exc
    if binary_targets and not np.all((hr == 0.0) | (hr == 1.0)):
        raise TrainingError("HR patches are not binary; pass binary_targets=False for grayscale training")

    torch.manual_seed(seed)
    model = build_model(arch)
    inputs = torch.as_tensor(lr, dtype=torch.float32).unsqueeze(1)
    targets = torch.as_tensor(hr - lr, dtype=torch.float32).unsqueeze(1)

    optimizer = torch.optim.Adam(model.parameters(), lr=learning_rate)
    shuffler = torch.Generator().manual_seed(seed)
    model.train()
    n = inputs.shape[0]
    for _ in range(epochs):
        order = torch.randperm(n, generator=shuffler)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            optimizer.zero_grad()
            loss = torch.nn.functional.mse_loss(model(inputs[idx]), targets[idx])
            loss.backward()
            optimizer.step()
    model.eval()
    return ModelArtifact(
        arch=arch,
        model=model,
        seed=seed,
        epochs=epochs,
        learning_rate=learning_rate,
        batch_size=batch_size,
        manifest_fingerprint=manifest.fingerprint,
        method=manifest.method,
    )


def residual_mse(artifact: ModelArtifact, manifest: Manifest, entries=None) -> float:
    """Mean squared error of the predicted residual against the true residual."""
    hr, lr = manifest.load_pairs(entries)
    inputs = torch.as_tensor(lr, dtype=torch.float32).unsqueeze(1)
    targets = torch.as_tensor(hr - lr, dtype=torch.float32).unsqueeze(1)
    artifact.model.eval()
    with torch.no_grad():
        pred = artifact.model(inputs)
        return float(torch.nn.functional.mse_loss(pred, targets))


def save_artifact(artifact: ModelArtifact, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "metadata.json"), "w", encoding="ascii") as fh:
        json.dump(artifact.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    torch.save(artifact.model.state_dict(), os.path.join(out_dir, "weights.pt"))


def load_artifact(path: str) -> ModelArtifact:
    try:
        with open(os.path.join(path, "metadata.json"), "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise TrainingError(f"cannot load artifact metadata: {exc}") from exc
    arch = ArchSpec.from_dict(meta["arch"])
    model = build_model(arch)
    state = torch.load(os.path.join(path, "weights.pt"), weights_only=True)
    model.load_state_dict(state)
    model.eval()
    return ModelArtifact(
        arch=arch,
        model=model,
        seed=meta["seed"],
        epochs=meta["epochs"],
        learning_rate=meta["learning_rate"],
        batch_size=meta["batch_size"],
        manifest_fingerprint=meta["manifest_fingerprint"],
        method=meta["method"],
    )
