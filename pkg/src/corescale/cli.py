"""Command-line entry point for reproducible batch runs.

Every run echoes its full effective configuration: file-producing
subcommands write ``<output>.echo.json`` next to their primary output
(override with ``--echo``), stdout-producing ones embed the config in the
printed JSON record.  Re-running a subcommand with ``--config`` pointing
at an echo file reproduces the run; explicit flags override config values.

Scale terminology on the ``resize`` subcommand: ``--scale 1/N`` shrinks
(generates a lower-resolution image), ``--scale N`` enlarges (generates a
higher-resolution-sized image).

Exit codes: 0 success, 1 domain error (printed as
``error: <code>: <message>``), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import harness
from .analysis import PSNR_INF, SsimParams, binarize, quality, zscore
from .errors import CoreScaleError
from .image import GrayImage, load_image, save_image
from .mechsim import SceneSpec, infer_mechanism, synth_groundtruth
from .registration import pair_images
from .resample import METHOD_NAMES, ResampleMethod, coarsen, method, refine

THREADS_ENV = "COREScale_THREADS"


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parse_methods(spec: str) -> list[ResampleMethod]:
    if spec == "all":
        return [method(n) for n in METHOD_NAMES]
    return [method(n.strip()) for n in spec.split(",") if n.strip()]


def _parse_scale(text: str) -> tuple[str, int]:
    """Return ("coarsen", N) for "1/N" or ("refine", N) for "N"."""
    text = text.strip()
    if text.startswith("1/"):
        factor = int(text[2:])
        kind = "coarsen"
    else:
        factor = int(text)
        kind = "refine"
    if factor < 1:
        raise CoreScaleError("bad-scale", f"scale factor must be >= 1, got {text!r}")
    return kind, factor


def _effective_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if not k.startswith("_") and k != "func"}
    return cfg


def _write_echo(args: argparse.Namespace, default_anchor: str | None) -> None:
    path = args.echo
    if path is None and default_anchor is not None:
        path = default_anchor + ".echo.json"
    if path is None:
        return
    with open(path, "w", encoding="ascii") as fh:
        json.dump(_effective_config(args), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _print_record(args: argparse.Namespace, record: dict) -> None:
    record = dict(record)
    record["config"] = _effective_config(args)
    print(json.dumps(record, indent=2, sort_keys=True))
    _write_echo(args, None)


# ---------------------------------------------------------------------------
# Subcommand bodies


def _cmd_resize(args) -> int:
    kind, factor = _parse_scale(args.scale)
    img = load_image(getattr(args, "in"))
    m = method(args.method)
    if kind == "coarsen":
        out = coarsen(img, factor, m, antialias=args.antialias)
    else:
        out = refine(img, factor, m)
    save_image(out, args.out, bit_depth=args.bit_depth)
    _write_echo(args, args.out)
    return 0


def _cmd_pair(args) -> int:
    hr = load_image(args.hr)
    lr = load_image(args.lr)
    if args.normalize:
        hr, lr = zscore(hr), zscore(lr)
    alignment = pair_images(
        hr,
        lr,
        args.factor,
        method(args.method),
        zero_mean=args.zero_mean,
        central_fraction=args.central_fraction,
        score_floor=args.score_floor,
    )
    _print_record(args, alignment.to_dict())
    return 0


def _cmd_normalize(args) -> int:
    img = load_image(getattr(args, "in"))
    z = zscore(img)
    lo, hi = float(z.pixels.min()), float(z.pixels.max())
    stored = GrayImage((z.pixels - lo) / (hi - lo), pixel_pitch=img.pixel_pitch)
    save_image(stored, args.out, bit_depth=args.bit_depth)
    _write_echo(args, args.out)
    print(json.dumps({"z_min": lo, "z_max": hi, "out": args.out}, sort_keys=True))
    return 0


def _cmd_segment(args) -> int:
    img = load_image(getattr(args, "in"))
    if args.normalize:
        img = zscore(img)
    bits = binarize(img, args.tau)
    save_image(bits.to_gray(), args.out, bit_depth=args.bit_depth)
    _write_echo(args, args.out)
    return 0


def _cmd_metrics(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    if args.max_i == "auto":
        max_i = float(np.ptp(b.pixels)) or 1.0
    else:
        max_i = float(args.max_i)
    small = a.width < 11 or a.height < 11
    window = args.ssim_window if not small else "global"
    q = quality(a, b, max_i, SsimParams(window=window, dynamic_range=max_i))
    record = {
        "mse": q.mse,
        "psnr_db": "inf" if q.psnr_db == PSNR_INF else q.psnr_db,
        "ssim": q.ssim,
        "max_i": max_i,
    }
    _print_record(args, record)
    return 0


def _cmd_bench(args) -> int:
    entries = harness.load_corpus(args.corpus)
    samples = harness.prepare_samples(
        entries,
        method(args.pair_method),
        normalize=args.normalize,
        zero_mean=args.zero_mean,
        central_fraction=args.central_fraction,
        score_floor=args.score_floor,
        threads=args.threads,
    )
    methods = _parse_methods(args.methods)
    if args.direction == "coarsen":
        report = harness.coarsen_eval(samples, methods)
    else:
        report = harness.refine_eval(samples, methods)
    fmt = args.format or ("json" if args.report.lower().endswith(".json") else "csv")
    harness.export_report(report, fmt, args.report)
    _write_echo(args, args.report)
    ranked = harness.rank_methods(report, key=args.rank_key)
    print(json.dumps({"report": args.report, "ranking": ranked}, sort_keys=True))
    return 0


def _cmd_mechsim(args) -> int:
    spec = SceneSpec(
        seed=args.seed,
        width=args.size,
        height=args.size,
        target_porosity=args.porosity,
        smooth_radius=args.smooth_radius,
        fracture_count=args.fractures,
        fracture_width=args.fracture_width,
        value_jitter=args.jitter,
    )
    gt = synth_groundtruth(spec)
    if args.dump_scene:
        save_image(gt, args.dump_scene, bit_depth=args.bit_depth)
    scales = [int(s) for s in args.scales.split(",") if s.strip()]
    reports = {}
    for scale in scales:
        rep = infer_mechanism(
            gt,
            hr_pitch=args.hr_pitch,
            scale=scale,
            fixed_probe=not args.ideal_probe,
            coarsen_antialias=args.coarsen_antialias,
        )
        reports[str(scale)] = rep.to_dict()
        if args.csv:
            root, ext = os.path.splitext(args.csv)
            path = args.csv if len(scales) == 1 else f"{root}-x{scale}{ext}"
            with open(path, "w", encoding="ascii") as fh:
                fh.write(rep.to_csv())
        if args.dump_dir:
            _dump_mechsim_images(gt, rep, args, scale)
    payload = {"scene": {k: v for k, v in sorted(vars(spec).items())}, "reports": reports}
    with open(args.out, "w", encoding="ascii") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_echo(args, args.out)
    return 0


def _dump_mechsim_images(gt, rep, args, scale) -> None:
    """Per simulated device: its HR capture A, LR capture B, and the winning C."""
    from .mechsim import simulate_capture

    os.makedirs(args.dump_dir, exist_ok=True)

    def norm(img):
        lo, hi = float(img.pixels.min()), float(img.pixels.max())
        rng = hi - lo or 1.0
        return GrayImage((img.pixels - lo) / rng)

    for s in rep.sim_methods:
        a = simulate_capture(gt, method(s), args.hr_pitch)
        b = simulate_capture(gt, method(s), args.hr_pitch * scale,
                             aperture=None if args.ideal_probe else float(args.hr_pitch))
        best = rep.best_per_sim[s]
        c = coarsen(a, scale, method(best), antialias=args.coarsen_antialias)
        for tag, img in (("A", a), ("B", b), (f"C-{best}", c)):
            path = os.path.join(args.dump_dir, f"x{scale}_{s}_{tag}.pgm")
            save_image(norm(img), path, bit_depth=args.bit_depth)


def _cmd_dataset(args) -> int:
    entries = harness.load_corpus(args.corpus)
    samples = harness.prepare_samples(
        entries,
        method(args.pair_method),
        normalize=args.normalize,
        zero_mean=args.zero_mean,
        central_fraction=args.central_fraction,
        score_floor=args.score_floor,
        threads=args.threads,
    )
    manifest = harness.build_manifest(
        samples,
        method(args.method),
        patch_size=args.patch,
        stride=args.stride,
        tau=args.tau,
        out_dir=args.out_dir,
        include_16x=args.include_16x,
    )
    _write_echo(args, os.path.join(args.out_dir, "manifest.json"))
    print(json.dumps({"manifest": os.path.join(args.out_dir, "manifest.json"),
                      "patch_pairs": len(manifest.entries)}, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# Parser assembly


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (an echo file); flags override its values")
    p.add_argument("--echo", help="path for the config echo file")


def _add_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus", required=True, help="corpus description JSON")
    p.add_argument("--pair-method", default="bilinear", choices=METHOD_NAMES)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True,
                   help="z-score images before pairing and evaluation")
    p.add_argument("--zero-mean", action="store_true", help="use zero-mean NCC for pairing")
    p.add_argument("--central-fraction", type=float, default=None)
    p.add_argument("--score-floor", type=float, default=0.5)
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help=f"worker cap for corpus loading (default ${THREADS_ENV} or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corescale",
        description="Resampling-method selection and SR dataset forging for paired micrographs.",
        epilog="Glossary: --scale 1/N shrinks (low-resolution generation), --scale N enlarges.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("resize", help="coarsen (--scale 1/N) or refine (--scale N) one image")
    p.add_argument("--in", required=True, help="input PGM/PNG")
    p.add_argument("--out", required=True, help="output PGM/PNG")
    p.add_argument("--method", default="bilinear", choices=METHOD_NAMES)
    p.add_argument("--scale", required=True, help='"1/N" to shrink or "N" to enlarge')
    p.add_argument("--antialias", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--bit-depth", type=int, default=8, choices=(8, 16))
    _add_common(p)
    p.set_defaults(func=_cmd_resize)

    p = sub.add_parser("pair", help="align an HR/LR pair by normalized cross-correlation")
    p.add_argument("--hr", required=True)
    p.add_argument("--lr", required=True)
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--method", default="bilinear", choices=METHOD_NAMES)
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--zero-mean", action="store_true")
    p.add_argument("--central-fraction", type=float, default=None)
    p.add_argument("--score-floor", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=_cmd_pair)

    p = sub.add_parser("normalize", help="z-score an image and store it min-max rescaled")
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bit-depth", type=int, default=16, choices=(8, 16))
    _add_common(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("segment", help="threshold an image into a binary PGM/PNG")
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--normalize", action="store_true", help="z-score before thresholding")
    p.add_argument("--bit-depth", type=int, default=8, choices=(8, 16))
    _add_common(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("metrics", help="print MSE/PSNR/SSIM of image A against reference B")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-i", default="auto", help='dynamic range; "auto" = peak-to-peak of B')
    p.add_argument("--ssim-window", default="gaussian", choices=("gaussian", "global"))
    _add_common(p)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("bench", help="evaluate all methods over a corpus and export a report")
    _add_corpus_flags(p)
    p.add_argument("--direction", required=True, choices=("coarsen", "refine"))
    p.add_argument("--methods", default="all", help='"all" or comma-separated method names')
    p.add_argument("--report", required=True, help="output CSV/JSON path")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="report format (default: by extension)")
    p.add_argument("--rank-key", default="psnr", choices=("psnr", "ssim", "rank_mean"))
    _add_common(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("mechsim", help="capture-mechanism inference on a synthetic scene")
    p.add_argument("--seed", type=int, default=SceneSpec().seed)
    p.add_argument("--size", type=int, default=1024)
    p.add_argument("--porosity", type=float, default=SceneSpec().target_porosity)
    p.add_argument("--smooth-radius", type=int, default=SceneSpec().smooth_radius)
    p.add_argument("--fractures", type=int, default=SceneSpec().fracture_count)
    p.add_argument("--fracture-width", type=float, default=SceneSpec().fracture_width)
    p.add_argument("--jitter", type=float, default=SceneSpec().value_jitter)
    p.add_argument("--scales", default="2,4", help="comma-separated integer scales")
    p.add_argument("--hr-pitch", type=int, default=2)
    p.add_argument("--ideal-probe", action="store_true",
                   help="let the probe aperture track the scan pitch (idealized device)")
    p.add_argument("--coarsen-antialias", action="store_true",
                   help="anti-alias the candidate coarsenings instead of plain interpolation")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--csv", default=None, help="optional CSV matrix path")
    p.add_argument("--dump-scene", default=None, help="optional PGM/PNG dump of the scene")
    p.add_argument("--dump-dir", default=None,
                   help="optional directory for per-device A/B/best-C intermediate images")
    p.add_argument("--bit-depth", type=int, default=16, choices=(8, 16))
    _add_common(p)
    p.set_defaults(func=_cmd_mechsim)

    p = sub.add_parser("dataset", help="forge an SR training manifest from a corpus")
    _add_corpus_flags(p)
    p.add_argument("--method", default="bilinear", choices=METHOD_NAMES,
                   help="generation method used to degrade the HR crops")
    p.add_argument("--patch", type=int, required=True)
    p.add_argument("--stride", type=int, required=True)
    p.add_argument("--tau", type=float, required=True, help="binarization threshold in z-score units")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--include-16x", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_dataset)

    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Load --config JSON as subcommand defaults; explicit flags still win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv  # let argparse report the missing value
    path = argv[idx + 1]
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CoreScaleError("bad-config", f"cannot load config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CoreScaleError("bad-config", f"config {path} must be a JSON object")
    sub = cfg.get("subcommand")
    invoked = argv[0] if argv and not argv[0].startswith("-") else None
    if sub and invoked and invoked != sub:
        raise CoreScaleError("bad-config", f"config is for {sub!r}, invoked as {invoked!r}")
    subparsers = parser._subparsers._group_actions[0].choices  # type: ignore[union-attr]
    target = invoked or sub
    if target not in subparsers:
        raise CoreScaleError("bad-config", f"config names no known subcommand ({target!r})")
    for action in subparsers[target]._actions:
        if action.dest in cfg and action.dest not in ("subcommand", "config", "echo"):
            action.default = cfg[action.dest]
            action.required = False
    return argv if invoked else [target, *argv]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except CoreScaleError as exc:
        print(f"error: {exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
