"""Command-line benchmark harness.

    bench <subcommand> --scenario <file> [--out <dir>] [--seed <u64>]

Subcommands: bandwidth, backdrive, benchmark, track, train-gait, tf.  Every
run writes report.json (machine-readable, deterministic for a fixed
scenario and seed) and report.txt (aligned table) plus experiment-specific
CSV files into the output directory.
"""

import argparse
import sys
from datetime import datetime, timezone

from ..errors import ExobenchError
from .experiments import run_experiment
from .scenario import EXPERIMENTS, load_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="actuation-paradigm benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run a {name} scenario")
        p.add_argument("--scenario", required=True,
                       help="path to the scenario file")
        p.add_argument("--out", default="bench-out",
                       help="output directory (default: ./bench-out)")
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed; overrides the scenario's seed")
        p.add_argument("--timestamp", action="store_true",
                       help="stamp the report with the wall-clock time "
                            "(breaks byte-identical re-runs)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if scenario.experiment != args.command:
            raise ExobenchError(
                f"scenario declares experiment {scenario.experiment!r} but the "
                f"{args.command!r} subcommand was invoked")
        if args.seed is not None and args.seed < 0:
            raise ExobenchError("seed must be non-negative")
        report = run_experiment(scenario, args.out, seed=args.seed)
        if args.timestamp:
            report.timestamp = datetime.now(timezone.utc).isoformat()
        paths = report.write(args.out)
        sys.stdout.write(report.to_text())
        for path in paths:
            print(f"wrote {path}")
        return 0
    except ExobenchError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
