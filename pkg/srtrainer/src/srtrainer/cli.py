"""srtrain: train, reconstruct with, and evaluate residual SR models."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .evaluate import EvalPair, EvaluationError, evaluate
from .manifest import ManifestError, load_manifest, split_entries
from .models import ArchSpec
from .pgm import PgmError, read_pgm, write_pgm
from .reconstruct import reconstruct
from .training import TrainingError, load_artifact, save_artifact, train


def _cmd_train(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.arch == "vdsr":
        arch = ArchSpec.vdsr()
    else:
        arch = ArchSpec.edsr_toy()
    entries = None
    if args.holdout_every:
        entries, _ = split_entries(manifest, args.holdout_every)
    artifact = train(
        manifest,
        arch,
        epochs=args.epochs,
        seed=args.seed,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        entries=entries,
        binary_targets=not args.grayscale_targets,
    )
    save_artifact(artifact, args.out)
    print(json.dumps({"model": args.out, "epochs": args.epochs, "seed": args.seed}, sort_keys=True))
    return 0


def _cmd_reconstruct(args) -> int:
    artifact = load_artifact(args.model)
    lr = read_pgm(getattr(args, "in"))
    method = args.method or artifact.method
    bits = reconstruct(artifact, lr, args.factor, method, tau=args.tau)
    write_pgm(args.out, bits.astype(float), bit_depth=8)
    print(json.dumps({"out": args.out, "method": method,
                      "method_matched": method == artifact.method}, sort_keys=True))
    return 0


def _cmd_evaluate(args) -> int:
    artifact = load_artifact(args.model)
    with open(args.pairs, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    base = os.path.dirname(os.path.abspath(args.pairs))
    pairs = [
        EvalPair(
            sample_id=str(item.get("id", f"pair-{i:03d}")),
            lr=read_pgm(os.path.join(base, item["lr"])),
            hr_bin=(read_pgm(os.path.join(base, item["hr_bin"])) >= 0.5).astype("uint8"),
            factor=int(item["factor"]),
        )
        for i, item in enumerate(doc)
    ]
    method = args.method or artifact.method
    report = evaluate(artifact, pairs, method, tau=args.tau)
    text = report.to_csv() if args.report.lower().endswith(".csv") else report.to_json()
    with open(args.report, "w", encoding="ascii") as fh:
        fh.write(text)
    print(json.dumps({"report": args.report,
                      "mean_psnr_increase_pct": report.mean_psnr_increase_pct,
                      "mean_ssim_increase_pct": report.mean_ssim_increase_pct}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srtrain", description="Residual SR training harness.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", help="train a model from a corescale-manifest/1 training set")
    p.add_argument("--manifest", required=True)
    p.add_argument("--arch", default="vdsr", choices=("vdsr", "edsr"))
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--holdout-every", type=int, default=0,
                   help="if set, train only on entries outside the every-Nth holdout")
    p.add_argument("--grayscale-targets", action="store_true",
                   help="accept continuous HR targets instead of binary ones")
    p.add_argument("--out", required=True, help="model artifact directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("reconstruct", help="reconstruct a binary HR image from a LR PGM")
    p.add_argument("--model", required=True)
    p.add_argument("--in", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--method", default=None, help="resize method (default: the training method)")
    p.add_argument("--tau", type=float, default=0.5)
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("evaluate", help="before/after report over a JSON list of eval pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True,
                   help='JSON list of {"lr": path, "hr_bin": path, "factor": int, "id": str?}')
    p.add_argument("--method", default=None)
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--report", required=True, help="output report path (.csv or .json)")
    p.set_defaults(func=_cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args)
    except (ManifestError, TrainingError, EvaluationError, PgmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
