"""Command-line entry point (``czjoint``).

Exit codes: 0 success, 1 containment violation, 2 usage error, 3 estimation
error (inconsistent measurements or divergence).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import bench
from .estimators import METHODS

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_ESTIMATION = 0, 1, 2, 3


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _method_list(text: str) -> tuple:
    methods = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return methods


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="czjoint", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("linear-batch", "run the random linear benchmark"),
                        ("nonlinear", "run the nonlinear example")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="JSON experiment config (default: the shipped one)")
        p.add_argument("--seed-override", type=_int_list, metavar="S[,S...]",
                       help="replace the configured seeds")
        p.add_argument("--horizon", type=_positive, help="last time step k")
        p.add_argument("--methods", type=_method_list, metavar="M[,M...]",
                       help=f"subset of {', '.join(METHODS)}")
        p.add_argument("--out", help=f"output directory (overrides ${bench.OUTPUT_ENV} and the config)")
        p.add_argument("--dump-sets", action="store_true",
                       help="also write every enclosure as JSON lines for `czjoint audit`")

    a = sub.add_parser("audit", help="re-check containment from dumped sets and a trajectory CSV")
    a.add_argument("--sets", nargs="+", required=True, help="set dumps written with --dump-sets")
    a.add_argument("--trajectory", required=True, help="trajectory CSV of the same run")
    a.add_argument("--tol", type=float, default=1e-9, help="membership tolerance (default 1e-9)")
    return parser


def _experiment_config(args) -> bench.ExperimentConfig:
    config = bench.load_config(args.config) if args.config else bench.default_config(args.command)
    if config.experiment != args.command:
        raise ValueError(f"config is for {config.experiment!r}, not {args.command!r}")
    changes = {}
    if args.seed_override:
        changes["seeds"] = args.seed_override
    if args.horizon:
        changes["horizon"] = args.horizon
    if args.methods:
        changes["methods"] = args.methods
    if args.dump_sets:
        changes["dump_sets"] = True
    return replace(config, **changes) if changes else config


def _print_linear(result):
    print(f"{'method':8s} {'mean_radius_x':>14s} {'mean_radius_p':>14s}")
    for m, s in result.summary.items():
        print(f"{m:8s} {s['mean_radius_x']:14.6f} {s['mean_radius_p']:14.6f}")


def _print_nonlinear(result):
    for k, v in result.summary.items():
        print(f"{k}: {v:.4f}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "audit":
        try:
            report = bench.audit_files(args.sets, args.trajectory, args.tol)
        except (OSError, ValueError, KeyError) as exc:
            print(f"czjoint audit: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(report.summary())
        return EXIT_OK if report.ok else EXIT_VIOLATION

    try:
        config = _experiment_config(args)
    except (OSError, ValueError) as exc:
        print(f"czjoint {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = bench.resolve_output_dir(config, args.out)
    runner = bench.run_linear_batch if args.command == "linear-batch" else bench.run_nonlinear
    result = runner(config, out, keep_traces=False)
    (_print_linear if args.command == "linear-batch" else _print_nonlinear)(result)
    print(result.report.summary())
    print(f"results written to {out}")
    if result.report.violations:
        return EXIT_VIOLATION
    if result.report.errors:
        return EXIT_ESTIMATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
