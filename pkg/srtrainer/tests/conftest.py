import json
import subprocess
import sys

import numpy as np
import pytest

from srtrainer import EvalPair, load_manifest
from srtrainer.pgm import read_pgm, write_pgm
from srtrainer.resample import coarsen


def corescale(args, cwd):
    """Run the dataset producer's CLI; its files are our only interface to it."""
    res = subprocess.run(["corescale", *args], capture_output=True, text=True, cwd=str(cwd))
    assert res.returncode == 0, f"corescale {' '.join(args)} failed: {res.stderr}"
    return res


def build_manifest_via_cli(tmp_dir, scene_seed, patch, stride, method="bilinear"):
    corescale(["mechsim", "--size", "512", "--scales", "2", "--seed", str(scene_seed),
               "--out", "mech.json", "--dump-scene", "scene.pgm"], tmp_dir)
    corescale(["resize", "--in", "scene.pgm", "--out", "lr.pgm",
               "--method", method, "--scale", "1/2", "--bit-depth", "16"], tmp_dir)
    (tmp_dir / "corpus.json").write_text(json.dumps(
        [{"hr": "scene.pgm", "lr": "lr.pgm", "factor": 2}]
    ))
    corescale(["dataset", "--corpus", "corpus.json", "--method", method,
               "--patch", str(patch), "--stride", str(stride), "--tau", "0.0",
               "--out-dir", "data"], tmp_dir)
    return load_manifest(str(tmp_dir / "data" / "manifest.json"))


def mechsim_scene(tmp_dir, seed):
    """A scene from the producer's generator, for distribution-matched eval."""
    corescale(["mechsim", "--size", "512", "--scales", "2", "--seed", str(seed),
               "--out", "eval-mech.json", "--dump-scene", "eval-scene.pgm"], tmp_dir)
    return read_pgm(str(tmp_dir / "eval-scene.pgm"))


@pytest.fixture(scope="session")
def small_manifest(tmp_path_factory):
    """16 patch pairs; enough for fast functional tests."""
    tmp = tmp_path_factory.mktemp("small-manifest")
    return build_manifest_via_cli(tmp, scene_seed=4242, patch=41, stride=157)


@pytest.fixture(scope="session")
def toy_manifest(tmp_path_factory):
    """225 patch pairs at 41x41; the acceptance-scale training set."""
    tmp = tmp_path_factory.mktemp("toy-manifest")
    return build_manifest_via_cli(tmp, scene_seed=1313, patch=41, stride=33)


def write_control_manifest(tmp_dir, hr_patches, lr_patches, patch_size, method="bilinear", tau=0.0):
    """Hand-built manifest for controlled training scenarios."""
    tmp_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (hr, lr) in enumerate(zip(hr_patches, lr_patches)):
        hname, lname = f"p{i:03d}_hr.pgm", f"p{i:03d}_lr.pgm"
        write_pgm(str(tmp_dir / hname), hr, bit_depth=16)
        write_pgm(str(tmp_dir / lname), lr, bit_depth=16)
        entries.append({"hr_patch": hname, "lr_patch": lname, "sample": f"s{i}"})
    doc = {
        "version": "corescale-manifest/1",
        "factor": 2,
        "patch_size": patch_size,
        "stride": patch_size,
        "tau": tau,
        "method": method,
        "entries": entries,
    }
    path = tmp_dir / "manifest.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return load_manifest(str(path))


def synthetic_scene(seed, size=512, porosity=0.3):
    """A porous continuous scene loosely matching the training corpus."""
    rng = np.random.default_rng(seed)
    noise = rng.random((size, size))
    k = np.ones(7) / 7.0
    rows = np.stack([np.convolve(r, k, mode="same") for r in noise])
    smooth = np.stack([np.convolve(c, k, mode="same") for c in rows.T]).T
    base = np.where(smooth < np.quantile(smooth, porosity), 0.25, 0.75)
    return base + rng.uniform(-0.05, 0.05, base.shape)


def make_eval_pairs(seed=None, scene=None, method="bilinear", factor=2, tile=40, count=16, tau=0.0):
    """Held-out evaluation pairs from a continuous scene: the binary HR truth
    and the low-resolution capture segmented at the shared threshold (the
    reconstruction-time input)."""
    if scene is None:
        scene = synthetic_scene(seed)
    z = (scene - scene.mean()) / scene.std()
    hr_bin = (z >= tau).astype(np.uint8)
    lr_bin = (coarsen(z, factor, method) >= tau).astype(np.float64)
    pairs = []
    step = tile + 24
    positions = [(y, x) for y in range(0, z.shape[0] - tile, step)
                 for x in range(0, z.shape[1] - tile, step)]
    for i, (y0, x0) in enumerate(positions[:count]):
        pairs.append(EvalPair(
            sample_id=f"eval-{i:03d}",
            lr=lr_bin[y0 // factor : (y0 + tile) // factor, x0 // factor : (x0 + tile) // factor],
            hr_bin=hr_bin[y0 : y0 + tile, x0 : x0 + tile],
            factor=factor,
        ))
    return pairs
