"""Command-line entry point: ``pulsecp detect`` and ``pulsecp simulate``."""

from __future__ import annotations

import argparse
import logging
import sys

from ._validation import PulseError
from .config import DetectorConfig, default_ridge, default_window
from .criterion import detect, detect_iterative
from .curves import pulse_curve
from .harness import HarnessError, run_replications, tabulate
from .io import (
    dumps,
    estimate_to_json,
    read_series_csv,
    write_curve_csv,
    write_text,
)
from .simulate import CP_BOUNDARIES, CP_N, cp_local_model, cp_model, variance_model

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2

logger = logging.getLogger("pulsecp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pulsecp", description="Ridge-ratio change-point detection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect change points in a CSV series")
    p.add_argument("--input", required=True, help="CSV file with one value column")
    p.add_argument("--target", choices=("mean", "variance"), default="mean")
    p.add_argument("--alpha", type=int, help="even window length (default: n**0.6/3)")
    p.add_argument("--ridge", type=float, help="ridge constant (default: sqrt(ln n / alpha))")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--ridge-scaling", choices=("literal", "scaled"), default="literal")
    p.add_argument("--iterative", action="store_true", help="recurse into estimated segments")
    p.add_argument("--output", help="write the JSON estimate here instead of stdout")
    p.add_argument("--curve", help="write the curves of the final pass as CSV")

    s = sub.add_parser("simulate", help="Monte-Carlo replications of a synthetic model")
    s.add_argument("--model", choices=("cp", "cp-local", "var"), required=True)
    s.add_argument("--scenario", type=int, choices=(1, 2, 3, 4), default=1)
    s.add_argument("--reps", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--iterative", action="store_true")
    s.add_argument("--out", help="write the table here instead of stdout")
    s.add_argument("--json", dest="json_out", help="also write the full report as JSON")
    s.add_argument("--var-levels", type=_float_list, help="comma-separated standard deviations")
    s.add_argument("--var-boundaries", type=_int_list, help="comma-separated change points")
    s.add_argument("--n", type=int, default=CP_N, help="series length for the variance model")
    s.add_argument("--workers", type=int, default=1)
    return parser


def cmd_detect(args) -> int:
    x = read_series_csv(args.input)
    alpha = args.alpha if args.alpha is not None else default_window(x.size)
    ridge = args.ridge if args.ridge is not None else default_ridge(x.size, alpha)
    config = DetectorConfig(alpha, ridge, args.tau, args.target, args.ridge_scaling)
    fn = detect_iterative if args.iterative else detect
    estimate = fn(x, config)
    text = estimate_to_json(estimate)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    if args.curve:
        write_curve_csv(args.curve, x, pulse_curve(x, estimate.config_used))
    return EXIT_OK


def _build_model(args):
    if args.model == "cp":
        return cp_model(args.scenario)
    if args.model == "cp-local":
        return cp_local_model(args.scenario)
    levels, bounds = args.var_levels, args.var_boundaries
    if levels is None:
        logger.warning("no --var-levels given; using the alternating 1/3 default levels")
        if bounds is not None and len(bounds) != len(CP_BOUNDARIES):
            raise PulseError("--var-boundaries without --var-levels must list 11 change points")
    return variance_model(levels, bounds, args.n, args.scenario)


def cmd_simulate(args) -> int:
    if args.reps < 1:
        raise PulseError("--reps must be at least 1")
    if args.workers < 1:
        raise PulseError("--workers must be at least 1")
    model = _build_model(args)
    policy = "iterative" if args.iterative else "plain"
    report = run_replications(model, policy, args.reps, args.seed, workers=args.workers)
    table = tabulate(report, header=True)
    if args.out:
        write_text(args.out, table)
    else:
        sys.stdout.write(table)
    if args.json_out:
        payload = {"model": model.to_dict(), "report": report.to_dict()}
        write_text(args.json_out, dumps(payload))
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "detect":
            return cmd_detect(args)
        return cmd_simulate(args)
    except (UsageError, PulseError, OSError) as exc:
        print(f"pulsecp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HarnessError as exc:
        print(f"pulsecp: error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last-resort guard
        logger.exception("internal error")
        print(f"pulsecp: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
