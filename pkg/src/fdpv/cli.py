"""Command-line entry point: ``fdpv {detect,plsc,simulate,calibrate,bench}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import core
from .bench import bench
from .core import CALIBRATIONS, DetectorSpec, FdpvError, Target
from .detect import fdpv, nuisance_scale
from .fd import write_trace_csv
from .io import ingest_csv, write_costs_csv
from .plsc import plsc_segment
from .simgen import builtin_scenario, load_scenario, monte_carlo
from .thresholds import critical_value

EXIT_CODES = {
    "usage error": 2,
    "I/O error": 3,
    **{cls.__name__: cls.exit_code for cls in (
        core.WindowTooLarge, core.NonFinite, core.MissingCovariate, core.DomainError,
        core.DegenerateVariance, core.DegenerateWindow, core.DegenerateDesign,
        core.SegmentTooShort, core.InfeasibleConfig, core.KMismatch, core.ParseError,
    )},
}

_EPILOG = "exit codes:\n  0  success\n" + "\n".join(
    f"  {code:<2} {name}" for name, code in sorted(EXIT_CODES.items(), key=lambda kv: kv[1])
) + "\n\nFDPV_THREADS caps the number of Monte Carlo worker threads."


def _emit(obj, path):
    text = json.dumps(obj, indent=2)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _detector_flags(p):
    p.add_argument("--target", choices=[t.value for t in Target], default="mean")
    p.add_argument("--window", "-A", type=int, required=True, help="sliding window width A")
    p.add_argument("--p1", type=float, default=0.05, help="Step-1 level (default 0.05)")
    p.add_argument("--p2", type=float, default=1e-4, help="Step-2 level (default 1e-4)")
    p.add_argument("--sigma", type=float, help="known noise standard deviation")
    p.add_argument("--mu", type=float, help="known mean (variance target)")
    p.add_argument("--nu", type=float, help="known std of (X - mu)^2 (variance target)")
    p.add_argument("--slope", type=float, help="known slope (intercept target)")
    sided = p.add_mutually_exclusive_group()
    sided.add_argument("--two-sided", dest="two_sided", action="store_true", default=True)
    sided.add_argument("--one-sided", dest="two_sided", action="store_false")
    _calibration_flag(p)


def _calibration_flag(p):
    p.add_argument("--calibration", choices=CALIBRATIONS, default="standardized",
                   help="Step-1 threshold scaling (default: standardized trace)")


def _spec_from(args) -> DetectorSpec:
    return DetectorSpec(
        target=args.target, window=args.window, level1=args.p1, level2=args.p2,
        sigma=args.sigma, mu=args.mu, nu=args.nu, slope=args.slope, two_sided=args.two_sided,
        calibration=args.calibration,
    )


def _read_input(args):
    mode = "regression" if args.target in ("slope", "intercept") else "univariate"
    return ingest_csv(args.input, mode)


def cmd_detect(args):
    series = _read_input(args)
    res = fdpv(series, _spec_from(args))
    out = res.segmentation.to_dict()
    if args.details:
        out = {
            "segmentation": out,
            "threshold": res.threshold.to_dict(),
            "candidates": [int(c) for c in res.step1.candidates],
            "tests": [r.to_dict() for r in res.step2],
        }
    _emit(out, args.output)
    if args.trace:
        write_trace_csv(res.trace, args.trace)


def cmd_plsc(args):
    series = ingest_csv(args.input, "univariate")
    penalty = args.penalty
    try:
        penalty = float(penalty)
    except ValueError:
        pass
    res = plsc_segment(series, args.kmax, args.min_seg, penalty)
    _emit(res.segmentation.to_dict(), args.output)
    if args.costs:
        write_costs_csv(res.costs, args.costs)


def cmd_simulate(args):
    scenario = load_scenario(args.scenario) if args.scenario.endswith(".json") else builtin_scenario(args.scenario)
    report = monte_carlo(args.method, scenario, replications=args.replications,
                         base_seed=args.seed, measure_memory=args.memory)
    _emit({"scenario": scenario.to_dict(), "report": report.to_dict()}, args.output)
    if args.rows:
        report.write_rows_csv(args.rows)


def cmd_calibrate(args):
    th = critical_value(args.target, args.n, args.window, args.p1, args.scale, args.delta,
                        args.calibration)
    key = "d_n" if args.target == "slope" else "c_n"
    _emit({"x": th.gumbel_x, key: th.normalizer, "C1": th.critical_value}, args.output)


def cmd_bench(args):
    sizes = [int(float(s)) for s in args.sizes.split(",")]
    rule = (lambda n: args.window) if args.window else None
    kwargs = {"window_rule": rule} if rule else {}
    table = bench(sizes, args.method, args.target, repeats=args.repeats, seed=args.seed, **kwargs)
    _emit(table.to_dict(), args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdpv",
        description="Offline multiple change-point detection by filtered derivative with p-values.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run FDpV on a CSV series")
    p.add_argument("input", help="CSV: one value per line, or x,y pairs for slope/intercept")
    _detector_flags(p)
    p.add_argument("--output", "-o", help="segmentation JSON (default stdout)")
    p.add_argument("--trace", help="write the filtered-derivative trace as CSV k,D")
    p.add_argument("--details", action="store_true", help="include candidates and Step-2 tests")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("plsc", help="penalized least-squares segmentation of the mean")
    p.add_argument("input")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--min-seg", type=int, default=2)
    p.add_argument("--penalty", default="bic", help="bic, slope, or a fixed beta")
    p.add_argument("--output", "-o")
    p.add_argument("--costs", help="write the J(K) curve as CSV")
    p.set_defaults(func=cmd_plsc)

    p = sub.add_parser("simulate", help="Monte Carlo experiment from a scenario")
    p.add_argument("scenario", help="scenario JSON file or built-in name (toy_mean, slope_large, slope_small)")
    p.add_argument("--method", choices=["fdpv", "plsc"], default="fdpv")
    p.add_argument("--replications", "-M", type=int)
    p.add_argument("--seed", type=int, help="base seed (default from scenario)")
    p.add_argument("--memory", action="store_true", help="measure peak memory of one run")
    p.add_argument("--output", "-o")
    p.add_argument("--rows", help="per-replication CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="Step-1 critical value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--window", "-A", type=int, required=True)
    p.add_argument("--p1", type=float, default=0.05)
    p.add_argument("--target", choices=[t.value for t in Target], default="mean")
    p.add_argument("--scale", type=float, default=1.0, help="sigma (or nu for variance)")
    p.add_argument("--delta", type=float, default=1.0, help="sampling step (slope)")
    _calibration_flag(p)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("bench", help="time/memory scaling")
    p.add_argument("--sizes", default="100000,200000,400000,800000")
    p.add_argument("--method", choices=["fdpv", "plsc"], default="fdpv")
    p.add_argument("--target", choices=[t.value for t in Target], default="mean")
    p.add_argument("--window", "-A", type=int, help="fixed window (default sqrt(n))")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except FdpvError as exc:
        print(f"fdpv: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fdpv: I/O error: {exc}", file=sys.stderr)
        return EXIT_CODES["I/O error"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
