import json

import numpy as np
import pytest

from srtrainer import ManifestError, load_manifest, split_entries


def test_loads_producer_manifest(small_manifest):
    assert small_manifest.version == "corescale-manifest/1"
    assert small_manifest.factor == 2
    assert small_manifest.patch_size == 41
    assert len(small_manifest.entries) == 16
    hr, lr = small_manifest.load_pairs()
    assert hr.shape == (16, 41, 41)
    assert set(np.unique(hr)) <= {0.0, 1.0}
    assert len(np.unique(lr)) > 2
    assert len(small_manifest.fingerprint) == 64


def test_version_rejected(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"version": "corescale-manifest/2", "entries": []}))
    with pytest.raises(ManifestError):
        load_manifest(str(path))


def test_missing_fields_rejected(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"version": "corescale-manifest/1", "factor": 2}))
    with pytest.raises(ManifestError):
        load_manifest(str(path))


def test_split_is_deterministic_and_disjoint(small_manifest):
    train_a, held_a = split_entries(small_manifest, holdout_every=4)
    train_b, held_b = split_entries(small_manifest, holdout_every=4)
    assert train_a == train_b and held_a == held_b
    assert len(train_a) + len(held_a) == len(small_manifest.entries)
    assert len(held_a) == len(small_manifest.entries) // 4
    ids = {id(e) for e in train_a} & {id(e) for e in held_a}
    assert not ids
