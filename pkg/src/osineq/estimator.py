"""Sample estimation of the index by subset averaging.

The estimator averages the weighted order-statistic contrast
``sum_k a_k X_{k:i}`` over size-m subsets of the sample and normalizes by
``m`` times the sample mean (defined as 0 when the sample sums to zero).
Three evaluation methods:

* ``enumerate`` -- literal average over all C(n, m) subsets (test oracle,
  guarded against combinatorial blowup),
* ``fast`` -- exact O(n log n + n m) rewrite: with the sample sorted, the
  j-th smallest value is the k-th order statistic of exactly
  C(j-1, k-1) * C(n-j, m-k) subsets, so the subset average collapses to a
  single weighted sum over sorted positions,
* ``subsample`` -- average over B uniformly drawn m-subsets (drawn
  independently, so repeats across draws are possible).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .seeding import as_generator, substream
from .weights import WeightScheme

__all__ = [
    "EstimateValue", "estimate_enumerate", "estimate_fast",
    "estimate_subsample", "scale_invariance_check",
    "order_stat_subset_weights", "ENUMERATION_LIMIT",
]

ENUMERATION_LIMIT = 10 ** 7

# exact integer binomials stay within float precision up to here
_EXACT_N = 60

# vectorized subset drawing keeps a (chunk, n) scratch matrix; past this n
# a per-draw choice loop is cheaper on memory
_VECTOR_DRAW_MAX_N = 4096
_SUBSAMPLE_CHUNK = 4096


@dataclass(frozen=True)
class EstimateValue:
    value: float
    method: str
    subsets_used: int
    scheme: WeightScheme


def _as_sample(values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("sample must be a non-empty 1-D vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite entries")
    if np.any(x < 0):
        raise ValueError("sample entries must be non-negative")
    return x


def _require_n_ge_m(n: int, m: int):
    if n < m:
        raise ValueError(f"need at least m={m} observations, got n={n}")


def estimate_enumerate(values, w: WeightScheme) -> EstimateValue:
    """Literal subset enumeration in lexicographic order (exact oracle)."""
    x = _as_sample(values)
    n = x.size
    _require_n_ge_m(n, w.m)
    n_subsets = math.comb(n, w.m)
    if n_subsets > ENUMERATION_LIMIT:
        raise ValueError(
            f"C({n},{w.m}) = {n_subsets} subsets exceeds the enumeration "
            f"guard of {ENUMERATION_LIMIT}; use the fast method")
    total = float(np.sum(x))
    if total == 0.0:
        return EstimateValue(0.0, "enumerate", n_subsets, w)
    a = np.asarray(w.a)
    acc = math.fsum(
        float(np.sort(x[list(idx)]) @ a)
        for idx in itertools.combinations(range(n), w.m))
    xbar = total / n
    return EstimateValue(acc / (n_subsets * w.m * xbar), "enumerate", n_subsets, w)


def order_stat_subset_weights(n: int, m: int, a) -> np.ndarray:
    """Weight of each sorted position j in the collapsed subset average.

    Returns w_j = sum_k a_k C(j-1, k-1) C(n-j, m-k) / C(n, m) for
    j = 1..n. Exact integer arithmetic is used up to n = 60; beyond that
    the binomials are evaluated in log space.
    """
    a = np.asarray(a, dtype=float)
    if n <= _EXACT_N:
        denom = math.comb(n, m)
        out = np.empty(n)
        for j in range(1, n + 1):
            acc = 0.0
            for k in range(1, m + 1):
                if a[k - 1] != 0.0:
                    acc += a[k - 1] * math.comb(j - 1, k - 1) * math.comb(n - j, m - k)
            out[j - 1] = acc / denom
        return out

    j = np.arange(1, n + 1, dtype=float)
    log_denom = gammaln(n + 1.0) - gammaln(m + 1.0) - gammaln(n - m + 1.0)
    out = np.zeros(n)
    with np.errstate(invalid="ignore"):
        for k in range(1, m + 1):
            if a[k - 1] == 0.0:
                continue
            valid = (j >= k) & (j <= n - m + k)
            jj = np.where(valid, j, float(k))
            lg = (gammaln(jj) - gammaln(float(k)) - gammaln(jj - k + 1.0)
                  + gammaln(n - jj + 1.0) - gammaln(float(m - k + 1))
                  - gammaln(n - jj - m + k + 1.0)
                  - log_denom)
            out += np.where(valid, a[k - 1] * np.exp(lg), 0.0)
    return out


def estimate_fast(values, w: WeightScheme) -> EstimateValue:
    """Exact estimator via the sorted-sample rewrite (default path)."""
    x = _as_sample(values)
    n = x.size
    _require_n_ge_m(n, w.m)
    n_subsets = math.comb(n, w.m)
    xs = np.sort(x)
    # summing the sorted array makes the result bitwise permutation-invariant
    total = float(np.sum(xs))
    if total == 0.0:
        return EstimateValue(0.0, "fast", n_subsets, w)
    pos_w = order_stat_subset_weights(n, w.m, w.a)
    value = float(xs @ pos_w) / (w.m * (total / n))
    return EstimateValue(value, "fast", n_subsets, w)


def _draw_subsets(rng, n: int, m: int, count: int) -> np.ndarray:
    """count uniformly random m-subsets of range(n), one per row."""
    if n <= _VECTOR_DRAW_MAX_N:
        keys = rng.random((count, n))
        return np.argpartition(keys, m - 1, axis=1)[:, :m]
    out = np.empty((count, m), dtype=np.intp)
    for i in range(count):
        out[i] = rng.choice(n, size=m, replace=False)
    return out


def _subsample_chunk_sum(x: np.ndarray, a: np.ndarray, m: int, rng,
                         count: int) -> float:
    idx = _draw_subsets(rng, x.size, m, count)
    return float(np.sum(np.sort(x[idx], axis=1) @ a))


def estimate_subsample(values, w: WeightScheme, B: int, rng, *,
                       workers: int = 1) -> EstimateValue:
    """Approximate the subset average from B random m-subsets.

    ``rng`` may be a Generator (sequential use) or an integer master seed;
    the seed form partitions B into fixed chunks with derived sub-streams,
    so the result is identical for any worker count.
    """
    x = _as_sample(values)
    n = x.size
    _require_n_ge_m(n, w.m)
    B = int(B)
    if B < 1:
        raise ValueError(f"subset count B must be >= 1, got {B}")
    total = float(np.sum(x))
    if total == 0.0:
        return EstimateValue(0.0, "subsample", B, w)
    a = np.asarray(w.a)
    sizes = [_SUBSAMPLE_CHUNK] * (B // _SUBSAMPLE_CHUNK)
    if B % _SUBSAMPLE_CHUNK:
        sizes.append(B % _SUBSAMPLE_CHUNK)

    if isinstance(rng, np.random.Generator):
        if workers > 1:
            raise ValueError(
                "parallel subsampling needs an integer master seed, not a Generator")
        gen = rng
        acc = math.fsum(_subsample_chunk_sum(x, a, w.m, gen, c) for c in sizes)
    else:
        seed = int(rng)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(
                    lambda ic: _subsample_chunk_sum(x, a, w.m,
                                                    substream(seed, ic[0]), ic[1]),
                    enumerate(sizes)))
            acc = math.fsum(parts)
        else:
            acc = math.fsum(
                _subsample_chunk_sum(x, a, w.m, substream(seed, i), c)
                for i, c in enumerate(sizes))

    xbar = total / n
    return EstimateValue(acc / (B * w.m * xbar), "subsample", B, w)


def scale_invariance_check(values, w: WeightScheme, c: float,
                           tol: float = 1e-12) -> bool:
    """True iff rescaling the sample by c > 0 leaves the estimate unchanged."""
    c = float(c)
    if not c > 0.0:
        raise ValueError(f"scale constant must be positive, got {c}")
    x = _as_sample(values)
    base = estimate_fast(x, w).value
    scaled = estimate_fast(c * x, w).value
    return abs(scaled - base) <= tol
