import numpy as np
import pytest
import torch

from conftest import write_control_manifest
from srtrainer import (
    ArchSpec,
    TrainingError,
    load_artifact,
    predict_residual,
    residual_mse,
    save_artifact,
    split_entries,
    train,
)


def test_zero_epochs_keeps_zero_residual(small_manifest):
    artifact = train(small_manifest, ArchSpec.vdsr(), epochs=0, seed=1)
    x = np.random.default_rng(0).random((41, 41)).astype(np.float32)
    assert float(torch.abs(predict_residual(artifact.model, x)).max()) == 0.0


def test_patch_size_mismatch_rejected(small_manifest):
    with pytest.raises(TrainingError):
        train(small_manifest, ArchSpec.edsr_toy(), epochs=0, seed=1)  # 48 != 41


def test_empty_entries_rejected(small_manifest):
    with pytest.raises(TrainingError):
        train(small_manifest, ArchSpec.vdsr(), epochs=0, seed=1, entries=())


def test_binary_target_enforcement(tmp_path):
    rng = np.random.default_rng(5)
    gray = [rng.random((41, 41)) for _ in range(2)]
    lr = [rng.random((41, 41)) for _ in range(2)]
    manifest = write_control_manifest(tmp_path, gray, lr, 41)
    with pytest.raises(TrainingError):
        train(manifest, ArchSpec.vdsr(), epochs=0, seed=1)
    train(manifest, ArchSpec.vdsr(), epochs=0, seed=1, binary_targets=False)


def test_zero_residual_fixed_point(tmp_path):
    # hr == lr and lr already binary: the target is identically zero, the
    # zero-initialized head emits zero, so gradients vanish and training
    # never moves off the fixed point
    rng = np.random.default_rng(6)
    bits = [(rng.random((41, 41)) > 0.5).astype(float) for _ in range(4)]
    manifest = write_control_manifest(tmp_path, bits, bits, 41)
    artifact = train(manifest, ArchSpec.vdsr(), epochs=3, seed=2)
    assert residual_mse(artifact, manifest) <= 1e-6
    x = bits[0].astype(np.float32)
    assert float(torch.abs(predict_residual(artifact.model, x)).max()) <= 1e-3


def test_seeded_training_reproducible(small_manifest):
    a = train(small_manifest, ArchSpec.vdsr(), epochs=2, seed=7)
    b = train(small_manifest, ArchSpec.vdsr(), epochs=2, seed=7)
    for (ka, va), (kb, vb) in zip(a.model.state_dict().items(), b.model.state_dict().items()):
        assert ka == kb
        assert torch.equal(va, vb), ka


def test_artifact_roundtrip(tmp_path, small_manifest):
    artifact = train(small_manifest, ArchSpec.vdsr(), epochs=1, seed=3)
    save_artifact(artifact, str(tmp_path / "model"))
    back = load_artifact(str(tmp_path / "model"))
    assert back.arch == artifact.arch
    assert back.seed == 3 and back.epochs == 1
    assert back.manifest_fingerprint == small_manifest.fingerprint
    assert back.method == "bilinear"
    x = np.random.default_rng(1).random((41, 41)).astype(np.float32)
    assert torch.equal(predict_residual(artifact.model, x), predict_residual(back.model, x))


def test_training_reduces_residual_mse_quickly(small_manifest):
    train_split, held = split_entries(small_manifest, holdout_every=4)
    base = train(small_manifest, ArchSpec.vdsr(), epochs=0, seed=4)
    baseline = residual_mse(base, small_manifest, held)
    fitted = train(small_manifest, ArchSpec.vdsr(), epochs=4, seed=4, entries=train_split)
    assert residual_mse(fitted, small_manifest, held) < baseline
