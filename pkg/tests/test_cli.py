import json
import subprocess
import sys

import numpy as np
import pytest

from corescale import GrayImage, load_image, method, save_image
from corescale.resample import coarsen


def run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "corescale.cli", *args],
        capture_output=True, text=True, cwd=str(cwd),
    )


@pytest.fixture
def workdir(tmp_path, rng):
    hr = GrayImage(0.05 + 0.9 * rng.random((64, 64)))
    save_image(hr, str(tmp_path / "hr.pgm"), bit_depth=16)
    lr = coarsen(load_image(str(tmp_path / "hr.pgm")), 2, method("bilinear"))
    save_image(lr, str(tmp_path / "lr.pgm"), bit_depth=16)
    corpus = [
        {"hr": "hr.pgm", "lr": "lr.pgm", "factor": 2, "region": "r1", "device": "d1"},
        {"hr": "hr.pgm", "lr": "lr.pgm", "factor": 2, "region": "r2", "device": "d1"},
    ]
    (tmp_path / "corpus.json").write_text(json.dumps(corpus))
    return tmp_path


def test_resize_coarsen_writes_file(workdir):
    res = run_cli(["resize", "--in", "hr.pgm", "--out", "half.pgm",
                   "--method", "bilinear", "--scale", "1/2"], workdir)
    assert res.returncode == 0, res.stderr
    out = load_image(str(workdir / "half.pgm"))
    assert (out.width, out.height) == (32, 32)
    assert (workdir / "half.pgm.echo.json").exists()


def test_resize_refine_scale_syntax(workdir):
    res = run_cli(["resize", "--in", "lr.pgm", "--out", "up.pgm",
                   "--method", "nearest", "--scale", "2"], workdir)
    assert res.returncode == 0, res.stderr
    assert load_image(str(workdir / "up.pgm")).width == 64


def test_domain_error_exit_1(workdir):
    res = run_cli(["resize", "--in", "missing.pgm", "--out", "x.pgm", "--scale", "2"], workdir)
    assert res.returncode == 1
    assert res.stderr.startswith("error: ")
    assert res.stderr.count("\n") == 1  # single-line machine-parseable


def test_usage_error_exit_2(workdir):
    assert run_cli(["frobnicate"], workdir).returncode == 2
    assert run_cli([], workdir).returncode == 2
    assert run_cli(["resize", "--in", "hr.pgm"], workdir).returncode == 2


def test_pair_emits_alignment_json(workdir):
    res = run_cli(["pair", "--hr", "hr.pgm", "--lr", "lr.pgm", "--factor", "2"], workdir)
    assert res.returncode == 0, res.stderr
    record = json.loads(res.stdout)
    assert record["offset_x"] == 0 and record["offset_y"] == 0
    assert record["score"] >= 0.999
    assert record["hr_rect"][2] == record["lr_rect"][2] * 2
    assert record["config"]["subcommand"] == "pair"


def test_metrics_record(workdir):
    res = run_cli(["metrics", "--a", "lr.pgm", "--b", "lr.pgm"], workdir)
    record = json.loads(res.stdout)
    assert record["mse"] == 0.0
    assert record["psnr_db"] == "inf"
    assert record["ssim"] == pytest.approx(1.0)


def test_normalize_and_segment(workdir):
    res = run_cli(["normalize", "--in", "hr.pgm", "--out", "z.pgm"], workdir)
    assert res.returncode == 0, res.stderr
    stats = json.loads(res.stdout)
    assert stats["z_min"] < 0 < stats["z_max"]
    res = run_cli(["segment", "--in", "hr.pgm", "--out", "bin.pgm", "--tau", "0.5"], workdir)
    assert res.returncode == 0, res.stderr
    bits = load_image(str(workdir / "bin.pgm"))
    assert set(np.unique(bits.pixels)) <= {0.0, 1.0}


def test_bench_report_shape(workdir):
    # --no-normalize: the LR files were generated straight from the HR files,
    # so the corpus is already commensurate and the generator must win
    res = run_cli(["bench", "--corpus", "corpus.json", "--direction", "coarsen",
                   "--report", "out.csv", "--no-normalize"], workdir)
    assert res.returncode == 0, res.stderr
    lines = (workdir / "out.csv").read_text().splitlines()
    assert lines[0] == "method,factor,sample,direction,mse,psnr_db,ssim"
    assert len(lines) == 1 + 2 * 6  # |samples| x 6 methods
    ranking = json.loads(res.stdout)["ranking"]
    assert ranking[0] == "bilinear"  # corpus was generated with bilinear


def test_bench_deterministic_across_runs_and_threads(workdir):
    for args, name in [
        (["--threads", "1"], "a.csv"),
        (["--threads", "1"], "b.csv"),
        (["--threads", "4"], "c.csv"),
    ]:
        res = run_cli(["bench", "--corpus", "corpus.json", "--direction", "refine",
                       "--report", name, *args], workdir)
        assert res.returncode == 0, res.stderr
    a = (workdir / "a.csv").read_bytes()
    assert a == (workdir / "b.csv").read_bytes()
    assert a == (workdir / "c.csv").read_bytes()


def test_config_echo_reproduces_run(workdir):
    res = run_cli(["bench", "--corpus", "corpus.json", "--direction", "coarsen",
                   "--report", "r1.csv"], workdir)
    assert res.returncode == 0, res.stderr
    res = run_cli(["bench", "--config", "r1.csv.echo.json", "--report", "r2.csv"], workdir)
    assert res.returncode == 0, res.stderr
    assert (workdir / "r1.csv").read_bytes() == (workdir / "r2.csv").read_bytes()


def test_config_subcommand_mismatch(workdir):
    run_cli(["metrics", "--a", "lr.pgm", "--b", "lr.pgm", "--echo", "m.echo.json"], workdir)
    res = run_cli(["resize", "--config", "m.echo.json", "--in", "hr.pgm",
                   "--out", "x.pgm", "--scale", "2"], workdir)
    assert res.returncode == 1
    assert "bad-config" in res.stderr


def test_mechsim_deterministic(workdir):
    base = ["mechsim", "--size", "512", "--scales", "2", "--seed", "7"]
    for out in ("m1.json", "m2.json"):
        res = run_cli([*base, "--out", out], workdir)
        assert res.returncode == 0, res.stderr
    assert (workdir / "m1.json").read_bytes() == (workdir / "m2.json").read_bytes()
    payload = json.loads((workdir / "m1.json").read_text())
    assert "2" in payload["reports"]
    assert len(payload["reports"]["2"]["matrix"]) == 6


def test_mechsim_dump_dir(workdir):
    res = run_cli(["mechsim", "--size", "512", "--scales", "2", "--seed", "7",
                   "--out", "m3.json", "--dump-scene", "scene.pgm",
                   "--dump-dir", "dumps"], workdir)
    assert res.returncode == 0, res.stderr
    assert (workdir / "scene.pgm").exists()
    dumps = sorted(p.name for p in (workdir / "dumps").iterdir())
    assert len(dumps) == 18  # A, B, best-C per simulated device
    assert "x2_nearest_A.pgm" in dumps


def test_threads_env_default(workdir):
    import os as _os
    env = dict(_os.environ, COREScale_THREADS="3")
    res = subprocess.run(
        [sys.executable, "-m", "corescale.cli", "bench", "--corpus", "corpus.json",
         "--direction", "coarsen", "--report", "envt.csv", "--no-normalize"],
        capture_output=True, text=True, cwd=str(workdir), env=env,
    )
    assert res.returncode == 0, res.stderr
    echo = json.loads((workdir / "envt.csv.echo.json").read_text())
    assert echo["threads"] == 3


def test_dataset_manifest(workdir):
    res = run_cli(["dataset", "--corpus", "corpus.json", "--method", "bilinear",
                   "--patch", "16", "--stride", "16", "--tau", "0.0",
                   "--out-dir", "data"], workdir)
    assert res.returncode == 0, res.stderr
    manifest = json.loads((workdir / "data" / "manifest.json").read_text())
    assert manifest["version"] == "corescale-manifest/1"
    assert len(manifest["entries"]) == 2 * 16  # two samples, 64x64 crops, 16px tiles
    first = manifest["entries"][0]
    assert (workdir / "data" / first["hr_patch"]).exists()
    assert (workdir / "data" / first["lr_patch"]).exists()
