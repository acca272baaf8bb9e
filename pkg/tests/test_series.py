import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qgtrace.errors import NonUnitLeadingCoefficient, ZeroLeadingCoefficient
from qgtrace.series import (InversePowerSeries as S, exp_series, from_floats, log1p_series,
                            quotient)

TOL = 1e-12
fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)


def series(order=6, unit=False):
    return st.lists(fractions, min_size=order + 1, max_size=order + 1).map(
        lambda cs: S([Fraction(1)] + cs[1:] if unit else cs, order))


def test_product_example():
    assert S([1, 1], 2) * S([1, -1], 2) == S([1, 0, -1], 2)
    a = S([1, 1, 1], 2)
    assert a * S.constant(1, 2) == a


def test_exponential_identity():
    for K in range(1, 9):
        e1 = S([Fraction(1, math.factorial(k)) for k in range(K + 1)], K)
        e2 = S([Fraction(2 ** k, math.factorial(k)) for k in range(K + 1)], K)
        assert e1 * e1 == e2


def test_log_examples():
    L = log1p_series(S([1, 1], 6))
    assert L.coefficients == tuple(Fraction((-1) ** (k + 1), k) if k else 0 for k in range(7))
    assert log1p_series(S.constant(1, 5)) == S([0], 5)
    with pytest.raises(NonUnitLeadingCoefficient):
        log1p_series(S([2, 1], 3))


def test_quotient_examples():
    a = S([1, 1], 5)
    assert quotient(a, a) == S.constant(1, 5)
    assert quotient(S.constant(1, 6), S([1, -1], 6)) == S([1] * 7, 6)
    with pytest.raises(ZeroLeadingCoefficient):
        quotient(a, S([0, 1], 5))


def test_truncation_bookkeeping():
    a = S([1, 2, 3], 2)
    b = S([0, 1, 1, 1, 1], 4)
    assert (a * b).order == 3
    assert (a + b).order == 2
    with pytest.raises(IndexError):
        a[3]


def test_float_coefficients_are_high_precision():
    s = from_floats([1.0, 0.1, 0.2])
    assert not s.is_exact
    back = exp_series(log1p_series(s))
    assert back.max_abs_diff(s) < 1e-30


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) - b == a


@settings(max_examples=60, deadline=None)
@given(series(unit=True))
def test_log_exp_round_trip(s):
    assert exp_series(log1p_series(s)) == s
    f = from_floats([float(c) for c in s.coefficients])
    assert exp_series(log1p_series(f)).max_abs_diff(f) <= TOL


@settings(max_examples=40, deadline=None)
@given(series(unit=True), series(unit=True))
def test_log_of_product(a, b):
    assert log1p_series(a * b) == log1p_series(a) + log1p_series(b)


@settings(max_examples=40, deadline=None)
@given(series(), series(unit=True))
def test_quotient_round_trip(s, t):
    assert quotient(s, t) * t == s
