"""Command-line interface: ``movelets {discover,transform,classify,synth,validate}``.

Exit codes: 0 on success, 2 on user or data errors, 1 on internal failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from collections import Counter
from pathlib import Path

from .discovery import discover, load_movelets
from .features import FeatureMatrix, knn_classify, transform
from .model import MoveletError, load_dataset, load_schema, validate_dataset
from .synth import SynthConfig, write_synth

log = logging.getLogger("movelets")


def _write_json(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def cmd_discover(args) -> int:
    schema = load_schema(args.schema)
    ds = load_dataset(args.train, schema)
    t0 = time.perf_counter()
    result = discover(ds, max_length=args.max_length, threads=args.threads, prune=args.prune_dominated)
    elapsed = time.perf_counter() - t0
    Path(args.out).write_text(result.dumps())

    per_class = Counter(m.label for m in result.movelets)
    report = {
        "train": str(args.train),
        "trajectories": len(ds),
        "max_length": args.max_length,
        "max_length_capped": args.max_length is not None,
        "prune_dominated": args.prune_dominated,
        "threads": args.threads or os.cpu_count(),
        "candidates_total": sum(result.candidates_per_trajectory.values()),
        "candidates_per_trajectory": result.candidates_per_trajectory,
        "movelets_total": len(result.movelets),
        "movelets_per_class": {c: per_class.get(c, 0) for c in ds.classes},
        "wall_time_s": round(elapsed, 3),
    }
    report_path = args.report or str(Path(args.out).with_suffix(".report.json"))
    _write_json(report_path, report)

    print(f"trajectories: {len(ds)}  classes: {', '.join(ds.classes)}")
    if args.max_length is not None:
        print(f"window length capped at {args.max_length} (full search uses each trajectory's length)")
    for tid, n in result.candidates_per_trajectory.items():
        print(f"  {tid}: candidates evaluated: {n}")
    print(f"candidates evaluated: {report['candidates_total']}")
    for c in ds.classes:
        print(f"  movelets for {c}: {per_class.get(c, 0)}")
    print(f"movelets: {len(result.movelets)} -> {args.out}  ({elapsed:.2f}s)")
    return 0


def cmd_transform(args) -> int:
    ds = load_dataset(args.data, load_schema(args.schema))
    movelets = load_movelets(args.movelets)
    fm = transform(ds, movelets, mode=args.mode)
    fm.write_csv(args.out)
    print(f"{len(fm.tids)} rows x {len(fm.columns)} columns -> {args.out}")
    return 0


def cmd_classify(args) -> int:
    train = FeatureMatrix.read_csv(args.train)
    test = FeatureMatrix.read_csv(args.test)
    if train.columns != test.columns:
        raise MoveletError("train and test feature files have different columns")
    if not 1 <= args.k <= len(train.tids):
        raise MoveletError(f"--k must be between 1 and {len(train.tids)}")
    result = knn_classify(train, test, k=args.k)
    print(f"accuracy: {result.accuracy:.4f}")
    for label, acc in result.per_class.items():
        print(f"  {label}: {acc:.4f}")
    if args.report:
        _write_json(args.report, {
            "k": args.k,
            "accuracy": result.accuracy,
            "per_class": result.per_class,
            "predictions": dict(zip(test.tids, result.predicted)),
        })
    return 0


def cmd_synth(args) -> int:
    try:
        cfg = SynthConfig(
            classes=args.classes,
            per_class=args.per_class,
            length=args.length,
            dims=args.dims,
            pattern_length=args.pattern_length,
            planted_dims=args.planted_dims,
            vocab=args.vocab or [],
            seed=args.seed,
        )
    except ValueError as exc:
        raise MoveletError(str(exc)) from None
    paths = write_synth(cfg, args.out_dir)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def cmd_validate(args) -> int:
    ds = load_dataset(args.data, load_schema(args.schema))
    report = validate_dataset(ds)
    print(json.dumps(report.to_json(), indent=2))
    return 0 if report.ok else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="movelets", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="discover movelets in a labeled trajectory CSV")
    p.add_argument("--train", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-length", type=int, default=None,
                   help="cap on window length (default: no cap)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: all CPUs)")
    p.add_argument("--report", default=None, help="run report path (default: <out>.report.json)")
    p.add_argument("--prune-dominated", action="store_true",
                   help="only use non-dominated opposite-class points as split-point candidates")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("transform", help="build a movelet feature matrix")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--movelets", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=("binary", "raw"), default="binary")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("classify", help="k-nearest-neighbour accuracy on feature matrices")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("synth", help="generate a planted-pattern dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--length", type=int, default=20)
    p.add_argument("--dims", type=int, default=4)
    p.add_argument("--pattern-length", type=int, default=3)
    p.add_argument("--planted-dims", type=int, default=2)
    p.add_argument("--vocab", type=int, nargs="+", default=None,
                   help="vocabulary size per dimension (default 30 each)")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="report dataset statistics and problems")
    p.add_argument("--data", required=True)
    p.add_argument("--schema", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MoveletError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
