"""Command line entry point: run experiments, verify bounds, inspect schedules."""

from __future__ import annotations

import argparse
import sys

from .harness import ExperimentConfig, run_experiment, verify_bounds
from .intervals import Interval, make_schedule


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--experiment", choices=("lea", "metric"), default="lea")
    parser.add_argument("--meta", default="cbce",
                        help="comma-separated subset of cbce,saol,fixedshare")
    parser.add_argument("--schedule", choices=("gc", "ds"), default="ds")
    parser.add_argument("--g", type=int, default=2, help="data streaming length multiplier")
    parser.add_argument("--prior", choices=("uniform", "paper"), default="uniform")
    parser.add_argument("--reps", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="directory for trace.csv and summary.json")
    parser.add_argument("--fs-m", type=int, default=2, help="switch budget given to fixedshare")
    parser.add_argument("--fs-horizon", type=int, default=None,
                        help="horizon given to fixedshare (defaults to the experiment horizon)")
    parser.add_argument("--horizon", type=int, default=None, help="override the horizon")
    parser.add_argument("--n-experts", type=int, default=None,
                        help="override the expert count (lea only)")
    parser.add_argument("--no-warm-start", action="store_true",
                        help="do not seed fresh runs from the previous decision")


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=args.experiment,
        metas=tuple(args.meta.split(",")),
        schedule=args.schedule,
        g=args.g,
        prior=args.prior,
        reps=args.reps,
        base_seed=args.seed,
        horizon=args.horizon,
        n_experts=args.n_experts,
        out_dir=args.out,
        fs_switches=args.fs_m,
        fs_horizon=args.fs_horizon,
        warm_start=not args.no_warm_start,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="cbce",
        description="Parameter-free online learning benchmarks for changing environments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run an experiment and write traces")
    _add_common(run_parser)

    vb_parser = sub.add_parser("verify-bounds", help="replay runs and check regret bounds")
    _add_common(vb_parser)

    part_parser = sub.add_parser("partition", help="print how a schedule splits an interval")
    part_parser.add_argument("start", type=int)
    part_parser.add_argument("end", type=int)
    part_parser.add_argument("--schedule", choices=("gc", "ds"), default="ds")
    part_parser.add_argument("--g", type=int, default=2)

    args = parser.parse_args(argv)

    if args.command == "run":
        result = run_experiment(_config(args))
        for name, stats in result.summary["algos"].items():
            print(f"{name}: mean total loss {stats['mean_total_loss']:.4f}")
        if result.csv_path is not None:
            print(f"wrote {result.csv_path} and {result.summary_path}")
        return 0

    if args.command == "verify-bounds":
        config = _config(args)
        if config.prior == "uniform":
            print("verify-bounds requires --prior paper", file=sys.stderr)
            return 2
        report = verify_bounds(config)
        counts = report.counts()
        print(
            f"meta regret checks: {counts['meta_checks']}, "
            f"violations: {counts['meta_violations']}"
        )
        print(f"window checks: {counts['sa_checks']}, violations: {counts['sa_violations']}")
        for check in report.violations:
            print(
                f"VIOLATED seed={check.seed} {check.kind} {check.subject}: "
                f"realized {check.realized:.6f} > bound {check.bound:.6f}",
                file=sys.stderr,
            )
        print("all bounds hold" if report.all_ok else "bounds violated")
        return 0 if report.all_ok else 1

    if args.command == "partition":
        schedule = make_schedule(args.schedule, args.g)
        interval = Interval(args.start, args.end)
        pieces = schedule.partition(interval)
        print(f"{schedule!r} partition of {interval}:")
        print("  " + " ".join(repr(p) for p in pieces))
        return 0

    parser.error(f"unknown command {args.command}")
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
