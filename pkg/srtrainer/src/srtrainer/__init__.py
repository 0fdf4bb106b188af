"""srtrainer: residual-network validation harness for forged SR training sets."""

from .evaluate import EvalPair, EvalRow, SrReport, evaluate
from .manifest import Manifest, ManifestError, load_manifest, split_entries
from .metrics import increase_ratio, mse, psnr, ssim
from .models import ArchSpec, build_model, predict_residual
from .pgm import read_pgm, write_pgm
from .reconstruct import reconstruct, reconstruct_continuous
from .resample import coarsen, refine
from .training import (
    ModelArtifact,
    TrainingError,
    load_artifact,
    residual_mse,
    save_artifact,
    train,
)

__version__ = "0.1.0"
