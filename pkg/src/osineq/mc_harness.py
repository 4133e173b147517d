"""Simulation campaigns producing bias / RMSE tables.

A campaign evaluates the estimator over a grid of (distribution, sample
size) cells. Per cell, ``r_mc`` replications each draw a fresh sample and
compute the estimate (exact fast path, or the random-subsample
approximation with ``b_combs`` subsets). Reported per cell: the population
benchmark, the Monte Carlo mean, bias, RMSE and the standard error of the
bias.

The population benchmark defaults to the deterministic quadrature index;
``benchmark = "mc"`` instead evaluates the estimator once on ``r_true``
draws, which reproduces the noisier protocol used for published tables.

Seeding: the benchmark stream for distribution ``i`` is
``substream(master_seed, 0, i)``; replication ``j`` of cell ``c`` uses
``substream(master_seed, 1, c, j)``. Results are therefore byte-identical
across runs and worker counts.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import Distribution
from .estimator import estimate_subsample, order_stat_subset_weights
from .index_core import index_via_order_stat_means
from .seeding import substream
from .weights import WeightScheme, mth_gini

__all__ = [
    "ExperimentConfig", "ExperimentRow", "ExperimentTable",
    "run_experiment", "render_table", "load_config",
]

_BENCHMARK_BATCHES = 50


@dataclass(frozen=True)
class ExperimentConfig:
    distributions: tuple[Distribution, ...]
    n_values: tuple[int, ...]
    master_seed: int
    scheme: WeightScheme = field(default_factory=lambda: mth_gini(3))
    r_mc: int = 2000
    b_combs: int = 8000
    r_true: int = 250_000
    estimator_method: str = "fast"
    benchmark: str = "quadrature"

    def __post_init__(self):
        object.__setattr__(self, "distributions", tuple(self.distributions))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.distributions:
            raise ValueError("at least one distribution is required")
        if not self.n_values:
            raise ValueError("at least one sample size is required")
        if min(self.r_mc, self.b_combs, self.r_true) < 1:
            raise ValueError("r_mc, b_combs and r_true must all be >= 1")
        if self.estimator_method not in ("fast", "subsample"):
            raise ValueError(
                f"estimator_method must be 'fast' or 'subsample', "
                f"got {self.estimator_method!r}")
        if self.benchmark not in ("quadrature", "mc"):
            raise ValueError(
                f"benchmark must be 'quadrature' or 'mc', got {self.benchmark!r}")
        bad = [n for n in self.n_values if n < self.scheme.m]
        if bad:
            raise ValueError(
                f"sample sizes {bad} are below the scheme order m={self.scheme.m}")


@dataclass(frozen=True)
class ExperimentRow:
    distribution: str
    n: int
    i_true: float
    mean: float
    bias: float
    rmse: float
    se_bias: float


@dataclass(frozen=True)
class ExperimentTable:
    rows: tuple[ExperimentRow, ...]
    scheme_name: str
    benchmark: str
    benchmark_se: tuple[float, ...]  # one entry per distribution (0 for quadrature)
    master_seed: int


def _benchmark_value(d: Distribution, cfg: ExperimentConfig,
                     dist_idx: int) -> tuple[float, float]:
    """Population benchmark and its standard error (0 when deterministic)."""
    if cfg.benchmark == "quadrature":
        return index_via_order_stat_means(d, cfg.scheme, "quadrature").value, 0.0
    gen = substream(cfg.master_seed, 0, dist_idx)
    x = np.sort(d.sample(cfg.r_true, gen))
    w = cfg.scheme
    pos_w = order_stat_subset_weights(x.size, w.m, w.a)
    value = float(x @ pos_w) / (w.m * float(np.mean(x)))
    # spread of the benchmark from batch re-estimates
    nb = _BENCHMARK_BATCHES
    size = x.size // nb
    if size >= max(w.m, 10):
        shuffled = d.sample(nb * size, substream(cfg.master_seed, 0, dist_idx, 1))
        batch = np.empty(nb)
        for b in range(nb):
            xs = np.sort(shuffled[b * size:(b + 1) * size])
            bw = order_stat_subset_weights(size, w.m, w.a)
            batch[b] = float(xs @ bw) / (w.m * float(np.mean(xs)))
        se = float(np.std(batch, ddof=1) / math.sqrt(nb))
    else:
        se = float("nan")
    return value, se


def _run_cell(d: Distribution, n: int, cfg: ExperimentConfig,
              cell_idx: int) -> np.ndarray:
    w = cfg.scheme
    est = np.empty(cfg.r_mc)
    if cfg.estimator_method == "fast":
        pos_w = order_stat_subset_weights(n, w.m, w.a)
        for j in range(cfg.r_mc):
            gen = substream(cfg.master_seed, 1, cell_idx, j)
            x = np.sort(d.sample(n, gen))
            est[j] = float(x @ pos_w) / (w.m * float(np.mean(x)))
    else:
        for j in range(cfg.r_mc):
            gen = substream(cfg.master_seed, 1, cell_idx, j)
            x = d.sample(n, gen)
            est[j] = estimate_subsample(x, w, cfg.b_combs, gen).value
    return est


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentTable:
    """Execute the campaign; deterministic for a given config."""
    cells = [(di, d, n) for di, d in enumerate(cfg.distributions)
             for n in cfg.n_values]
    bench = [_benchmark_value(d, cfg, di) for di, d in enumerate(cfg.distributions)]

    def work(item):
        cell_idx, (di, d, n) = item
        return _run_cell(d, n, cfg, cell_idx)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, enumerate(cells)))
    else:
        results = [work(item) for item in enumerate(cells)]

    rows = []
    for (di, d, n), est in zip(cells, results):
        i_true = bench[di][0]
        mean = float(np.mean(est))
        rows.append(ExperimentRow(
            distribution=d.spec_string(),
            n=n,
            i_true=i_true,
            mean=mean,
            bias=mean - i_true,
            rmse=float(np.sqrt(np.mean((est - i_true) ** 2))),
            se_bias=float(np.std(est, ddof=1) / math.sqrt(cfg.r_mc)),
        ))
    return ExperimentTable(tuple(rows), cfg.scheme.name, cfg.benchmark,
                           tuple(se for _, se in bench), cfg.master_seed)


_COLUMNS = ("distribution", "n", "i_true", "mean", "bias", "rmse", "se_bias")


def _fmt(x: float, full_precision: bool) -> str:
    return repr(x) if full_precision else f"{x:.4f}"


def render_table(table: ExperimentTable, format: str = "csv",
                 full_precision: bool = False) -> str:
    """Render rows as CSV (stable header) or a markdown table."""
    if not table.rows:
        raise ValueError("cannot render an empty experiment table")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for r in table.rows:
            writer.writerow([r.distribution, r.n,
                             _fmt(r.i_true, full_precision),
                             _fmt(r.mean, full_precision),
                             _fmt(r.bias, full_precision),
                             _fmt(r.rmse, full_precision),
                             _fmt(r.se_bias, full_precision)])
        return buf.getvalue()
    if format == "markdown":
        lines = ["| Distribution | n | I_true | Mean | Bias | RMSE | SE |",
                 "|---|---|---|---|---|---|---|"]
        for r in table.rows:
            lines.append(
                f"| {r.distribution} | {r.n} | {_fmt(r.i_true, full_precision)} "
                f"| {_fmt(r.mean, full_precision)} | {_fmt(r.bias, full_precision)} "
                f"| {_fmt(r.rmse, full_precision)} | {_fmt(r.se_bias, full_precision)} |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {format!r}")


_CONFIG_KEYS = ("distributions", "n_values", "scheme", "r_mc", "b_combs",
                "r_true", "estimator_method", "master_seed", "benchmark")


def load_config(path: str) -> ExperimentConfig:
    """Parse a flat TOML config file; unknown keys are errors."""
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    from .distributions import parse_distribution
    from .weights import parse_weights

    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = sorted(set(raw) - set(_CONFIG_KEYS))
    if unknown:
        raise ValueError(f"unknown config key(s) {unknown} in {path}")
    for key in ("distributions", "n_values", "master_seed"):
        if key not in raw:
            raise ValueError(f"config {path} is missing required key {key!r}")

    kwargs = {
        "distributions": tuple(parse_distribution(s) for s in raw["distributions"]),
        "n_values": tuple(int(n) for n in raw["n_values"]),
        "master_seed": int(raw["master_seed"]),
    }
    if "scheme" in raw:
        kwargs["scheme"] = parse_weights(raw["scheme"])
    for key in ("r_mc", "b_combs", "r_true"):
        if key in raw:
            kwargs[key] = int(raw[key])
    for key in ("estimator_method", "benchmark"):
        if key in raw:
            kwargs[key] = str(raw[key])
    return ExperimentConfig(**kwargs)
