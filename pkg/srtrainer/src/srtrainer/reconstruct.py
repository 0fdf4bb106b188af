"""High-resolution reconstruction from low-resolution inputs."""

from __future__ import annotations

import numpy as np

from .models import predict_residual
from .resample import refine
from .training import ModelArtifact


def reconstruct_continuous(
    artifact: ModelArtifact, lr: np.ndarray, factor: int, method: str
) -> np.ndarray:
    """refine(lr) plus the predicted residual, before thresholding.

    ``lr`` is expected to be the real low-resolution image already
    segmented at the manifest's threshold, matching the binary-then-degrade
    pipeline the model was trained on.
    """
    refined = refine(lr, factor, method)
    residual = predict_residual(artifact.model, refined.astype(np.float32)).numpy()
    return refined + residual.astype(np.float64)


def reconstruct(
    artifact: ModelArtifact, lr: np.ndarray, factor: int, method: str, tau: float = 0.5
) -> np.ndarray:
    """Binary HR reconstruction: threshold the residual-corrected refinement.

    Returns a uint8 array of {0, 1} with dims = lr dims x factor.  Using a
    ``method`` different from the manifest's generation method is allowed
    but degrades quality; the evaluation report records the mismatch.
    """
    return (reconstruct_continuous(artifact, lr, factor, method) >= tau).astype(np.uint8)
