"""Command-line entry point.

Subcommands: ``index`` (population index), ``estimate`` (sample estimate
from a CSV column), ``delta`` (rank-level bias atom), ``bias`` (estimator
bias at a sample size), ``simulate`` (bias/RMSE campaign from a TOML
config), ``selftest`` (closed-form oracles and the fast-vs-enumerate
battery).

Exit codes: 0 success, 1 usage or input error, 2 numeric non-convergence.
Numeric results go to stdout, diagnostics to stderr, so scripted pipelines
can separate the two.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import bias_lab, estimator, index_core, mc_harness
from .distributions import parse_distribution
from .quadrature import QuadratureError
from .seeding import substream
from .weights import parse_weights

__all__ = ["main", "dispatch"]


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(value: float, full_precision: bool) -> str:
    return repr(float(value)) if full_precision else f"{value:.6g}"


def _default_workers() -> int:
    raw = os.environ.get("OSINEQ_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_common(p: _Parser, *, seed=True, full_precision=True):
    if seed:
        p.add_argument("--seed", type=int, default=0,
                       help="master seed for all random streams (default 0)")
    if full_precision:
        p.add_argument("--full-precision", action="store_true",
                       help="print shortest round-trip floats instead of 6 digits")


def build_parser() -> _Parser:
    parser = _Parser(prog="osineq",
                     description="Linear order-statistic inequality indices")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[], help="population index of a distribution",
                       description="Evaluate the population index under a weight scheme.")
    p.add_argument("--dist", required=True, help="distribution spec, e.g. gamma:2,1")
    p.add_argument("--weights", required=True, help="weight scheme, e.g. gini or mth:3")
    p.add_argument("--method", default="quantile",
                   choices=["quantile", "orderstat", "maxrep", "covariance", "lorenz"])
    p.add_argument("--reps", type=int, default=1_000_000,
                   help="Monte Carlo draws for the covariance method")
    _add_common(p)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("estimate", help="estimate the index from CSV data",
                       description="Estimate the index from one numeric CSV column.")
    p.add_argument("--data", required=True, help="CSV file with a header row")
    p.add_argument("--column", required=True, help="name of the numeric column")
    p.add_argument("--weights", required=True)
    p.add_argument("--method", default="fast",
                   choices=["fast", "enumerate", "subsample"])
    p.add_argument("--B", type=int, default=8000,
                   help="subsets drawn by the subsample method (default 8000)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for subsampling (default $OSINEQ_THREADS or 1)")
    _add_common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("delta", help="rank-level bias atom",
                       description="Evaluate the bias atom at sample size n and rank r.")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--method", default="mc", choices=["mc", "laplace"])
    p.add_argument("--reps", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(func=_cmd_delta)

    p = sub.add_parser("bias", help="estimator bias at a sample size",
                       description="Combine rank-level atoms into the estimator bias.")
    p.add_argument("--dist", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", default="laplace", choices=["laplace", "mc"])
    p.add_argument("--reps", type=int, default=100_000)
    _add_common(p)
    p.set_defaults(func=_cmd_bias)

    p = sub.add_parser("simulate", help="run a bias/RMSE campaign",
                       description="Run the simulation campaign described by a TOML config.")
    p.add_argument("--config", required=True, help="TOML experiment config")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--markdown", action="store_true",
                   help="also print a markdown table to stdout")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads across cells (default $OSINEQ_THREADS or 1)")
    p.add_argument("--full-precision", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("selftest", help="run the built-in oracle suite",
                       description="Closed-form index oracles plus the "
                                   "fast-vs-enumerate equivalence battery.")
    _add_common(p, full_precision=False)
    p.set_defaults(func=_cmd_selftest)

    return parser


def _cmd_index(args) -> int:
    d = parse_distribution(args.dist)
    w = parse_weights(args.weights)
    if args.method == "quantile":
        res = index_core.index_via_quantile_integral(d, w)
    elif args.method == "orderstat":
        res = index_core.index_via_order_stat_means(d, w, "quadrature")
    elif args.method == "maxrep":
        res = index_core.index_via_max_representation(d, w, "quadrature")
    elif args.method == "lorenz":
        res = index_core.index_via_lorenz(d, w)
    else:
        res = index_core.index_via_covariance_mc(d, w, args.reps,
                                                 substream(args.seed))
    print(f"{_fmt(res.value, args.full_precision)} ± "
          f"{_fmt(res.uncertainty, args.full_precision)}")
    return 0


def _load_column(path: str, column: str) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        names = [h.strip() for h in header]
        if column not in names:
            raise ValueError(
                f"{path}: column {column!r} not found; available: {names}")
        col = names.index(column)
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if col >= len(row):
                raise ValueError(f"{path}:{lineno}: row has no column {column!r}")
            tok = row[col].strip()
            try:
                x = float(tok)
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: non-numeric value {tok!r} in column "
                    f"{column!r}") from None
            if not math.isfinite(x) or x < 0:
                raise ValueError(
                    f"{path}:{lineno}: negative or non-finite value {tok} in "
                    f"column {column!r}")
            values.append(x)
    if not values:
        raise ValueError(f"{path}: column {column!r} has no data rows")
    return np.asarray(values)


def _cmd_estimate(args) -> int:
    w = parse_weights(args.weights)
    x = _load_column(args.data, args.column)
    if args.method == "fast":
        res = estimator.estimate_fast(x, w)
    elif args.method == "enumerate":
        res = estimator.estimate_enumerate(x, w)
    else:
        workers = args.threads if args.threads is not None else _default_workers()
        res = estimator.estimate_subsample(x, w, args.B, args.seed,
                                           workers=workers)
    print(_fmt(res.value, args.full_precision))
    return 0


def _cmd_delta(args) -> int:
    d = parse_distribution(args.dist)
    if args.method == "laplace":
        res = bias_lab.delta_laplace(d, args.n, args.r)
    else:
        res = bias_lab.delta_mc(d, args.n, args.r, reps=args.reps,
                                rng=substream(args.seed))
    print(f"{_fmt(res.value, args.full_precision)} ± "
          f"{_fmt(res.uncertainty, args.full_precision)}")
    return 0


def _cmd_bias(args) -> int:
    d = parse_distribution(args.dist)
    w = parse_weights(args.weights)
    if args.method == "laplace":
        deltas = [bias_lab.delta_laplace(d, args.n, r) for r in range(1, w.m + 1)]
    else:
        deltas = bias_lab.delta_mc_batch(d, args.n, range(1, w.m + 1),
                                         reps=args.reps, rng=substream(args.seed))
    res = bias_lab.bias_from_deltas(w, deltas)
    print(f"{_fmt(res.value, args.full_precision)} ± "
          f"{_fmt(res.uncertainty, args.full_precision)}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = mc_harness.load_config(args.config)
    workers = args.threads if args.threads is not None else _default_workers()
    table = mc_harness.run_experiment(cfg, workers=workers)
    text = mc_harness.render_table(table, "csv", args.full_precision)
    with open(args.out, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {len(table.rows)} rows to {args.out}", file=sys.stderr)
    if args.markdown:
        print(mc_harness.render_table(table, "markdown", args.full_precision),
              end="")
    return 0


def _cmd_selftest(args) -> int:
    from .distributions import Exponential, Gamma, Uniform
    from .weights import (custom, extended_mth_gini, gini, mth_gini,
                          s_gini_orderstat)

    checks = []
    qint = lambda d, w: index_core.index_via_quantile_integral(d, w).value
    gamma_gini = lambda a: math.gamma(a + 0.5) / (math.sqrt(math.pi) * math.gamma(a + 1.0))
    checks.append(("gini(exponential:1) = 0.5",
                   abs(qint(Exponential(1.0), gini()) - 0.5) < 1e-9))
    checks.append(("gini(uniform:0,1) = 1/3",
                   abs(qint(Uniform(0.0, 1.0), gini()) - 1.0 / 3.0) < 1e-9))
    checks.append(("gini(gamma:2,1) matches the gamma closed form",
                   abs(qint(Gamma(2.0, 1.0), gini()) - gamma_gini(2.0)) < 1e-9))
    checks.append(("gini(gamma:5,1) matches the gamma closed form",
                   abs(qint(Gamma(5.0, 1.0), gini()) - gamma_gini(5.0)) < 1e-9))

    rng = substream(args.seed, 99)
    schemes = [gini(), mth_gini(3), extended_mth_gini(4, 2, 3),
               s_gini_orderstat(4, 2), custom([-1.5, -0.5, 0.75, 1.25], True)]
    worst = 0.0
    for _ in range(40):
        n = int(rng.integers(5, 13))
        x = rng.gamma(2.0, 1.0, n)
        for w in schemes:
            if n >= w.m:
                gap = abs(estimator.estimate_fast(x, w).value
                          - estimator.estimate_enumerate(x, w).value)
                worst = max(worst, gap)
    checks.append((f"fast = enumerate battery (max gap {worst:.2e})", worst < 1e-10))

    failed = 0
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else 2


def dispatch(argv) -> int:
    """Parse and run one command, mapping failures to the exit-code taxonomy."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if code is not None else 0
    try:
        return args.func(args)
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
