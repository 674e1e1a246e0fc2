"""``toepcov`` command line: estimate, simulate, spectral, norm.

Exit status 0 on success, 2 for malformed input files, 3 for invalid flags
or flag combinations, 1 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .base import SymmetricToeplitz
from .estimators import (
    plug_in_matrix,
    tapered_matrix,
    threshold_after_banding,
    thresholded_matrix,
)
from .experiments import ESTIMATORS, ExperimentConfig, run_table_cell
from .io import (
    InputFormatError,
    dense_to_csv,
    format_value,
    header_line,
    json_safe,
    read_series_csv,
    read_toeplitz,
    toeplitz_to_csv,
)
from .linalg import NormConvergenceError, norm_of_difference, operator_norm
from .process import parse_model
from .spectral import lag_window_estimate, periodogram
from .tapers import TAPERS

EXIT_INPUT = 2
EXIT_FLAGS = 3
EXIT_NUMERIC = 1

ESTIMATE_KINDS = ("plug-in", "banded", "thresholded", "threshold-after-banding")


class UsageError(Exception):
    """Invalid flag or flag combination."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def _header(args, seed=None, **extra) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    config.update(extra)
    return {"version": __version__, "seed": seed, "config": config}


def _write(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _output_format(args) -> str:
    if args.format:
        return args.format
    if args.out and Path(args.out).suffix.lower() == ".csv":
        return "csv"
    return "json"


def _dump(obj) -> str:
    return json.dumps(json_safe(obj), indent=2) + "\n"


# -- estimate -------------------------------------------------------------------


def _check_estimate_flags(args, T):
    kind = args.estimator
    needs_B = kind in ("banded", "threshold-after-banding")
    needs_A = kind in ("thresholded", "threshold-after-banding")
    if needs_B:
        if args.bandwidth is None:
            raise UsageError(f"--estimator {kind} requires --bandwidth")
        if not 1 <= args.bandwidth <= T - 1:
            raise UsageError(f"--bandwidth must lie in [1, {T - 1}], got {args.bandwidth}")
    elif args.bandwidth is not None:
        raise UsageError(f"--bandwidth does not apply to --estimator {kind}")
    if needs_A:
        if args.threshold is None:
            raise UsageError(f"--estimator {kind} requires --threshold")
        if not args.threshold >= 0:
            raise UsageError("--threshold must be nonnegative")
    elif args.threshold is not None:
        raise UsageError(f"--threshold does not apply to --estimator {kind}")
    if args.taper is not None and not needs_B:
        raise UsageError(f"--taper does not apply to --estimator {kind}")


def cmd_estimate(args) -> int:
    if args.dense and _output_format(args) != "csv":
        raise UsageError("--dense needs CSV output")
    x = read_series_csv(args.input)
    if x.size < 4:
        raise InputFormatError(f"need at least 4 values, found {x.size}", path=args.input)
    _check_estimate_flags(args, x.size)
    taper = args.taper or "rectangular"
    kind = args.estimator
    if kind == "plug-in":
        est = plug_in_matrix(x, center=args.center)
    elif kind == "banded":
        est = tapered_matrix(x, taper, args.bandwidth, center=args.center)
    elif kind == "thresholded":
        est = thresholded_matrix(x, args.threshold, center=args.center)
    else:
        est = threshold_after_banding(x, taper, args.bandwidth, args.threshold, center=args.center)

    error = None
    if args.truth:
        truth = read_toeplitz(args.truth)
        if truth.dimension < x.size:
            raise InputFormatError(
                f"truth has dimension {truth.dimension}, series has length {x.size}",
                path=args.truth)
        truth = SymmetricToeplitz(truth.first_column[: x.size])
        error = norm_of_difference(est, truth).value

    header = _header(args)
    meta = {"estimator": kind, "bandwidth": args.bandwidth, "threshold": args.threshold,
            "taper": taper if kind in ("banded", "threshold-after-banding") else None,
            "center": args.center, "error": error,
            "nonzero_lags": est.nonzero_lags().tolist()}
    if _output_format(args) == "csv":
        header["estimate"] = meta
        text = dense_to_csv(est, header) if args.dense else toeplitz_to_csv(est, header)
    else:
        text = _dump({"header": header, **meta, **est.to_dict()})
    _write(text, args.out)
    return 0


# -- simulate ---------------------------------------------------------------------


def _simulate_model(args):
    name = args.model.strip().lower()
    if name in ("x-process", "y-process"):
        return parse_model(f"{name}({args.c},{args.alpha})")
    if "(" in name or name == "white-noise":
        return parse_model(name)
    raise UsageError(f"unknown --model {args.model!r}")


def cmd_simulate(args) -> int:
    if args.T < 4:
        raise UsageError("--T must be >= 4")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    estimators = [e.strip().replace("-", "_") for e in args.estimators.split(",") if e.strip()]
    unknown = [e for e in estimators if e not in ESTIMATORS]
    if unknown or not estimators:
        raise UsageError(f"--estimators must be drawn from {', '.join(ESTIMATORS)}")
    try:
        model = _simulate_model(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not hasattr(model, "coefficient_array"):
        raise UsageError("simulate needs a linear process model")
    config = ExperimentConfig(model, args.T, args.reps, args.seed, estimators,
                              args.taper, center=args.center)
    report = run_table_cell(config)
    header = _header(args, seed=args.seed, experiment=config.echo())
    table = report.to_table() + "\n"
    fmt = _output_format(args)
    if fmt == "csv":
        lines = [header_line(header),
                 "estimator,mean_error,sd_error,mean_bandwidth_or_nnz,sd_bandwidth_or_nnz,replications"]
        for name, s in report.summaries.items():
            vals = [s.mean_error, s.sd_error, s.mean_bandwidth_or_nnz, s.sd_bandwidth_or_nnz]
            lines.append(",".join([name] + ["" if v is None else format_value(v) for v in vals]
                                  + [str(s.replications)]))
        text = "\n".join(lines) + "\n"
    else:
        text = _dump({"header": header, **report.to_dict()})
    if args.out is None:
        sys.stdout.write(table)
        sys.stdout.write(text)
    else:
        sys.stdout.write(table)
        Path(args.out).write_text(text)
    return 0


# -- spectral ---------------------------------------------------------------------


def cmd_spectral(args) -> int:
    x = read_series_csv(args.input)
    if x.size < 2:
        raise InputFormatError("need at least 2 values", path=args.input)
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    theta = np.linspace(-np.pi, np.pi, args.grid)
    theta = np.where(np.arange(args.grid) < args.grid // 2, theta, -theta[::-1])
    if args.method == "periodogram":
        if args.bandwidth is not None:
            raise UsageError("--bandwidth does not apply to the periodogram")
        xc = x - x.mean() if args.center else x
        f = periodogram(xc, theta) / (2 * np.pi)
    else:
        if args.bandwidth is None:
            raise UsageError("--method lag-window requires --bandwidth")
        if not 1 <= args.bandwidth <= x.size - 1:
            raise UsageError(f"--bandwidth must lie in [1, {x.size - 1}]")
        f = lag_window_estimate(x, args.taper, args.bandwidth, args.center)(theta)
    header = _header(args)
    if _output_format_spectral(args) == "json":
        text = _dump({"header": header, "theta": theta, "f_hat": f})
    else:
        lines = [header_line(header), "theta,f_hat"]
        lines += [f"{format_value(t)},{format_value(v)}" for t, v in zip(theta, f)]
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0


def _output_format_spectral(args):
    if args.format:
        return args.format
    if args.out and Path(args.out).suffix.lower() == ".json":
        return "json"
    return "csv"


# -- norm -----------------------------------------------------------------------------


def cmd_norm(args) -> int:
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    m = read_toeplitz(args.input)
    res = operator_norm(m, tol=args.tol, method=args.method)
    _write(_dump({"header": _header(args), **res.to_dict()}), args.out)
    return 0


# -- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toepcov", description="Autocovariance matrix estimation for time series.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    tapers = sorted(TAPERS)

    e = sub.add_parser("estimate", help="estimate the autocovariance matrix of a series")
    e.add_argument("input", help="CSV file, one value per line")
    e.add_argument("--estimator", choices=ESTIMATE_KINDS, default="plug-in")
    e.add_argument("--bandwidth", type=int)
    e.add_argument("--threshold", type=float)
    e.add_argument("--taper", choices=tapers)
    e.add_argument("--center", action="store_true", help="subtract the sample mean")
    e.add_argument("--truth", help="true first column (CSV or JSON); reports the error")
    e.add_argument("--out")
    e.add_argument("--format", choices=("json", "csv"))
    e.add_argument("--dense", action="store_true", help="write the full matrix as CSV")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("simulate", help="Monte Carlo table cell with oracle tuning")
    s.add_argument("--model", default="x-process",
                   help="x-process, y-process or a preset such as 'ar1(0.5)'")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--c", type=float, default=0.5)
    s.add_argument("--T", type=int, default=100)
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--estimators", default="banded,thresholded,plug_in")
    s.add_argument("--taper", choices=tapers, default="rectangular")
    s.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"))
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("spectral", help="spectral density estimate on a symmetric grid")
    f.add_argument("input", help="CSV file, one value per line")
    f.add_argument("--method", choices=("lag-window", "periodogram"), default="lag-window")
    f.add_argument("--bandwidth", type=int)
    f.add_argument("--taper", choices=tapers, default="bartlett")
    f.add_argument("--center", action="store_true")
    f.add_argument("--grid", type=int, default=257, help="number of frequencies in [-pi, pi]")
    f.add_argument("--out")
    f.add_argument("--format", choices=("json", "csv"))
    f.set_defaults(func=cmd_spectral)

    n = sub.add_parser("norm", help="operator norm of a symmetric Toeplitz matrix")
    n.add_argument("input", help="first column as CSV or JSON {dimension, first_column}")
    n.add_argument("--tol", type=float, default=1e-10)
    n.add_argument("--method", choices=("auto", "dense", "iterative"), default="auto")
    n.add_argument("--out")
    n.set_defaults(func=cmd_norm)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"toepcov {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except (InputFormatError, OSError) as exc:
        print(f"toepcov {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NormConvergenceError as exc:
        print(f"toepcov {args.subcommand}: error: {exc} (estimate {exc.estimate})",
              file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
