import math

import pytest

from osineq.distributions import Degenerate, Exponential, Uniform
from osineq.index_core import index_via_order_stat_means
from osineq.weights import (ZERO_SUM_TOL, custom, extended_lower_upper,
                            extended_mth_gini, gini, mth_gini, parse_weights,
                            s_gini_orderstat, s_gini_published)


def test_gini():
    w = gini()
    assert w.m == 2 and w.a == (-1.0, 1.0) and w.zero_sum
    assert abs(w.weight_sum) <= ZERO_SUM_TOL


def test_gini_index_value_uniform():
    # classical Gini of U(0,1) is 1/3 via E|X1-X2| / (2 mean)
    val = index_via_order_stat_means(Uniform(0.0, 1.0), gini(), "closed").value
    assert val == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_mth_gini():
    assert mth_gini(2).a == gini().a
    assert mth_gini(4).a == (-1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        mth_gini(1)
    # exponential m=3: (H_3 - 1/3) / 3 = 1/2 from the order-statistic sums
    val = index_via_order_stat_means(Exponential(1.0), mth_gini(3), "closed").value
    assert val == pytest.approx(0.5, abs=1e-12)


def test_extended_mth_gini():
    assert extended_mth_gini(3, 1, 3).a == mth_gini(3).a
    assert extended_mth_gini(3, 1, 2).a == (-1.0, 1.0, 0.0)
    for j, k in [(2, 2), (3, 1), (0, 2), (1, 4)]:
        with pytest.raises(ValueError):
            extended_mth_gini(3, j, k)
    # uniform, ranks (2,3) of a 3-sample: (3/4 - 2/4) / (3 * 1/2) = 1/6
    val = index_via_order_stat_means(Uniform(0.0, 1.0),
                                     extended_mth_gini(3, 2, 3), "closed").value
    assert val == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_extended_lower_upper():
    lo = extended_lower_upper(2, 1, "lower")
    assert lo.a == (-0.5, 0.5) and not lo.zero_sum
    up = extended_lower_upper(2, 2, "upper")
    # uniform: (E[max of 2] - mean) / (2 mean) = (2/3 - 1/2) / 1 = 1/6
    val = index_via_order_stat_means(Uniform(0.0, 1.0), up, "closed").value
    assert val == pytest.approx(1.0 / 6.0, abs=1e-12)
    # exponential, m=3: lower index is (mean - E[min of 3])/(3 mean) = 2/9,
    # and the rank argument does not move the value (E[X_i] is always mean)
    for i in (1, 2, 3):
        v = index_via_order_stat_means(Exponential(1.0),
                                       extended_lower_upper(3, i, "lower"),
                                       "closed").value
        assert v == pytest.approx(2.0 / 9.0, abs=1e-12)
    # equality case
    val0 = index_via_order_stat_means(Degenerate(5.0), lo, "closed").value
    assert val0 == 0.0
    with pytest.raises(ValueError):
        extended_lower_upper(3, 0, "lower")
    with pytest.raises(ValueError):
        extended_lower_upper(3, 4, "upper")
    with pytest.raises(ValueError):
        extended_lower_upper(3, 1, "middle")


def test_s_gini_published_values():
    w = s_gini_published(2, 2.0)
    assert w.a[0] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert w.a[1] == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert not w.zero_sum
    assert "published-verbatim" in w.name
    with pytest.raises(ValueError):
        s_gini_published(2, 1.0)
    with pytest.raises(ValueError):
        s_gini_published(2, 0.5)


def test_s_gini_published_sum_identity():
    # integer-arithmetic oracle: sum_k nu * (1 - C(m-k+nu-1, m-k)/C(m+nu-1, m))
    for nu in (2, 3, 4):
        for m in range(2, 7):
            oracle = sum(
                nu * (1.0 - math.comb(m - k + nu - 1, m - k) / math.comb(m + nu - 1, m))
                for k in range(1, m + 1))
            w = s_gini_published(m, float(nu))
            assert w.weight_sum == pytest.approx(oracle, abs=1e-10)
            assert w.weight_sum == pytest.approx(m * (nu - 1.0), abs=1e-10)


def test_s_gini_published_limit():
    w = s_gini_published(3, 1.0 + 1e-9)
    assert max(abs(x) for x in w.a) < 1e-7


def test_s_gini_published_does_not_match_closed_form():
    # the verbatim Table-1 weights evaluate to 10/9 for uniform at
    # m = nu = 2, not the S-Gini (= Gini) value 1/3; reported as-is
    val = index_via_order_stat_means(Uniform(0.0, 1.0),
                                     s_gini_published(2, 2.0), "closed").value
    assert val == pytest.approx(10.0 / 9.0, abs=1e-12)


def test_s_gini_orderstat():
    assert s_gini_orderstat(2, 2).a == gini().a
    assert s_gini_orderstat(3, 2).a == (-1.0, 0.0, 1.0)
    assert abs(s_gini_orderstat(6, 4).weight_sum) <= ZERO_SUM_TOL
    for nu in (1, 4):
        with pytest.raises(ValueError):
            s_gini_orderstat(3, nu)


def test_s_gini_orderstat_closed_form_uniform():
    # R_nu = 1 - E[min of nu]/mean; uniform nu=3: 1 - (1/4)/(1/2) = 1/2
    val = index_via_order_stat_means(Uniform(0.0, 1.0),
                                     s_gini_orderstat(3, 3), "closed").value
    assert val == pytest.approx(0.5, abs=1e-12)
    assert val == pytest.approx((3.0 - 1.0) / (3.0 + 1.0), abs=1e-12)


def test_custom():
    assert custom([-1.0, 1.0], True).zero_sum
    assert custom([-2.0, 1.0, 1.0], True).m == 3
    with pytest.raises(ValueError, match="2.000e"):
        custom([1.0, 1.0], True)
    with pytest.raises(ValueError):
        custom([1.0])


def test_identical_gini_variants():
    expected = gini().a
    assert mth_gini(2).a == expected
    assert extended_mth_gini(2, 1, 2).a == expected
    assert s_gini_orderstat(2, 2).a == expected


def test_zero_sum_constructors():
    for w in [gini(), mth_gini(5), extended_mth_gini(4, 2, 3),
              s_gini_orderstat(5, 3), custom([-2.0, 0.5, 1.5], True)]:
        assert abs(w.weight_sum) <= ZERO_SUM_TOL


def test_nondecreasing_flag():
    assert gini().is_nondecreasing
    assert mth_gini(4).is_nondecreasing
    assert not extended_mth_gini(3, 1, 2).is_nondecreasing or \
        extended_mth_gini(3, 1, 2).a == (-1.0, 1.0, 0.0)
    assert not custom([1.0, -1.0]).is_nondecreasing


def test_parse_weights():
    assert parse_weights("gini").a == (-1.0, 1.0)
    assert parse_weights("mth:3").a == (-1.0, 0.0, 1.0)
    assert parse_weights("ext:3,1,2").a == (-1.0, 1.0, 0.0)
    assert parse_weights("sgini:2,2").a[0] == pytest.approx(2.0 / 3.0)
    assert parse_weights("sginios:3,2").a == (-1.0, 0.0, 1.0)
    assert parse_weights("lower:2,1").a == (-0.5, 0.5)
    assert parse_weights("upper:3,2").a[-1] == pytest.approx(2.0 / 3.0)
    assert parse_weights("custom:-1,0,1").a == (-1.0, 0.0, 1.0)


def test_parse_weights_errors():
    with pytest.raises(ValueError, match="'bogus'"):
        parse_weights("bogus:3")
    with pytest.raises(ValueError, match="expected 3"):
        parse_weights("ext:3,1")
    with pytest.raises(ValueError, match="'x'"):
        parse_weights("mth:x")
    with pytest.raises(ValueError, match="no parameters"):
        parse_weights("gini:2")
