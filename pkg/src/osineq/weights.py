"""Coefficient vectors defining members of the index family.

A scheme of order ``m`` is a vector ``(a_1, ..., a_m)`` applied to the
expected order statistics of an m-sample. Constructors cover the classical
Gini contrast, min-max and two-rank contrasts, the lower/upper single-rank
variants, two S-Gini weightings, and arbitrary user vectors.

The two S-Gini constructors intentionally coexist: ``s_gini_published`` keeps
the published weight row verbatim (its weights sum to ``m * (nu - 1)``, not
zero, and the resulting index does not match the S-Gini closed form), while
``s_gini_orderstat`` derives zero-sum weights whose index equals
``1 - E[min of nu draws] / mean`` exactly. Keeping both makes the
discrepancy testable instead of silently resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "WeightScheme", "gini", "mth_gini", "extended_mth_gini",
    "extended_lower_upper", "s_gini_published", "s_gini_orderstat",
    "custom", "parse_weights", "ZERO_SUM_TOL",
]

ZERO_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightScheme:
    m: int
    a: tuple[float, ...]
    name: str
    zero_sum: bool

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"weight scheme order must be >= 2, got {self.m}")
        if len(self.a) != self.m:
            raise ValueError(
                f"weight vector length {len(self.a)} does not match order {self.m}")
        if not all(math.isfinite(x) for x in self.a):
            raise ValueError("weight coefficients must be finite")
        if self.zero_sum and abs(self.weight_sum) > ZERO_SUM_TOL:
            raise ValueError(
                f"scheme {self.name!r} asserts a zero coefficient sum but "
                f"sums to {self.weight_sum:.3e}")

    @property
    def weight_sum(self) -> float:
        return math.fsum(self.a)

    @property
    def is_nondecreasing(self) -> bool:
        return all(self.a[i] <= self.a[i + 1] for i in range(self.m - 1))


def gini() -> WeightScheme:
    """Classical Gini contrast: order 2, weights (-1, 1)."""
    return WeightScheme(2, (-1.0, 1.0), "gini", True)


def mth_gini(m: int) -> WeightScheme:
    """Min-max contrast of an m-sample: a_1 = -1, a_m = 1, zeros between."""
    m = _check_order(m)
    a = [0.0] * m
    a[0], a[-1] = -1.0, 1.0
    return WeightScheme(m, tuple(a), f"mth_gini({m})", True)


def extended_mth_gini(m: int, j: int, k: int) -> WeightScheme:
    """Contrast between ranks j < k of an m-sample: a_j = -1, a_k = 1."""
    m = _check_order(m)
    j, k = int(j), int(k)
    if not (1 <= j < k <= m):
        raise ValueError(
            f"extended contrast needs ranks 1 <= j < k <= m, got j={j}, k={k}, m={m}")
    a = [0.0] * m
    a[j - 1], a[k - 1] = -1.0, 1.0
    return WeightScheme(m, tuple(a), f"extended({m},{j},{k})", True)


def extended_lower_upper(m: int, i: int, side: str) -> WeightScheme:
    """Single-observation-vs-extreme contrasts.

    ``lower`` yields the index (mean - E[min of m]) / (m * mean); ``upper``
    yields (E[max of m] - mean) / (m * mean). The coefficient sum is
    recorded, not asserted, so the zero-sum condition is relaxed here.
    """
    m = _check_order(m)
    i = int(i)
    if not 1 <= i <= m:
        raise ValueError(f"rank must satisfy 1 <= i <= m, got i={i}, m={m}")
    if side == "lower":
        a = [1.0 / m] * m
        a[0] -= 1.0
    elif side == "upper":
        a = [-1.0 / m] * m
        a[-1] += 1.0
    else:
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    return WeightScheme(m, tuple(a), f"{side}({m},{i})", False)


def s_gini_published(m: int, nu: float) -> WeightScheme:
    """Published S-Gini weight row, kept verbatim.

    a_k = nu * [1 - C(m-k+nu-1, m-k) / C(m+nu-1, m)] with gamma-function
    binomials for real nu > 1. The coefficients sum to m * (nu - 1).
    """
    m = _check_order(m)
    nu = float(nu)
    if not nu > 1.0:
        raise ValueError(f"S-Gini tail parameter must exceed 1, got {nu}")
    # C(m-k+nu-1, m-k) / C(m+nu-1, m); the Gamma(nu) factors cancel
    log_denom = math.lgamma(m + nu) - math.lgamma(m + 1.0)
    a = tuple(
        nu * -math.expm1(math.lgamma(m - k + nu) - math.lgamma(m - k + 1.0) - log_denom)
        for k in range(1, m + 1))
    return WeightScheme(m, a, f"s_gini[published-verbatim]({m},{nu:g})", False)


def s_gini_orderstat(m: int, nu: int) -> WeightScheme:
    """Zero-sum weights reproducing the S-Gini closed form for integer nu.

    a_k = 1 - m * C(m-k, nu-1) / C(m, nu). A uniformly random nu-subset of
    an m-sample has its minimum at rank k with probability
    C(m-k, nu-1) / C(m, nu), so the index equals 1 - E[min of nu] / mean.
    """
    m = _check_order(m)
    nu = int(nu)
    if not 2 <= nu <= m:
        raise ValueError(f"order-statistic S-Gini needs 2 <= nu <= m, got nu={nu}, m={m}")
    denom = math.comb(m, nu)
    a = tuple(1.0 - m * math.comb(m - k, nu - 1) / denom for k in range(1, m + 1))
    return WeightScheme(m, a, f"s_gini_orderstat({m},{nu})", True)


def custom(a, assert_zero_sum: bool = False) -> WeightScheme:
    """Wrap an arbitrary coefficient vector verbatim."""
    a = tuple(float(x) for x in a)
    if len(a) < 2:
        raise ValueError(f"a weight vector needs at least 2 entries, got {len(a)}")
    return WeightScheme(len(a), a, f"custom({len(a)})", assert_zero_sum)


def _check_order(m: int) -> int:
    m = int(m)
    if m < 2:
        raise ValueError(f"weight scheme order must be >= 2, got {m}")
    return m


def parse_weights(text: str) -> WeightScheme:
    """Parse the CLI weight syntax.

    ``gini``, ``mth:m``, ``ext:m,j,k``, ``sgini:m,nu``, ``sginios:m,nu``,
    ``lower:m,i``, ``upper:m,i``, ``custom:a1,a2,...``.
    """
    head, _, tail = text.partition(":")
    kind = head.strip().lower()
    if kind == "gini":
        if tail.strip():
            raise ValueError(f"gini takes no parameters, got {text!r}")
        return gini()
    if kind not in ("mth", "ext", "sgini", "sginios", "lower", "upper", "custom"):
        raise ValueError(f"unknown weight scheme {head.strip()!r} in {text!r}")
    tokens = [tok.strip() for tok in tail.split(",")] if tail.strip() else []
    if kind == "custom":
        vals = [_parse_float(tok, text) for tok in tokens]
        return custom(vals, assert_zero_sum=False)
    if kind == "mth":
        (m,) = _take(tokens, 1, text)
        return mth_gini(_parse_int(m, text))
    if kind == "ext":
        m, j, k = _take(tokens, 3, text)
        return extended_mth_gini(_parse_int(m, text), _parse_int(j, text),
                                 _parse_int(k, text))
    if kind == "sgini":
        m, nu = _take(tokens, 2, text)
        return s_gini_published(_parse_int(m, text), _parse_float(nu, text))
    if kind == "sginios":
        m, nu = _take(tokens, 2, text)
        return s_gini_orderstat(_parse_int(m, text), _parse_int(nu, text))
    # lower / upper
    m, i = _take(tokens, 2, text)
    return extended_lower_upper(_parse_int(m, text), _parse_int(i, text), kind)


def _take(tokens, want, text):
    if len(tokens) != want:
        raise ValueError(
            f"weight scheme {text!r} has {len(tokens)} parameter(s); expected {want}")
    return tokens


def _parse_int(tok: str, text: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ValueError(f"bad integer parameter {tok!r} in weights {text!r}") from None


def _parse_float(tok: str, text: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ValueError(f"bad numeric parameter {tok!r} in weights {text!r}") from None
