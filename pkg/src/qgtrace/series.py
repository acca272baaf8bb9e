"""Truncated power series ``sum_k c_k u**k`` with explicit truncation order.

Coefficients stay exact (``fractions.Fraction``) as long as every input is
rational.  Anything transcendental is carried as a 128-bit mpmath float, and
mixing the two promotes to the float type.
"""
from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath.ctx_mp import MPContext

from .errors import NonUnitLeadingCoefficient, ZeroLeadingCoefficient

mp = MPContext()
mp.prec = 128
_MPF = type(mp.mpf(1))
_UNIT_TOL = mp.mpf(2) ** -100


def to_coeff(value):
    """Normalise a scalar to ``Fraction`` (exact) or a 128-bit mpf."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, _MPF):
        return value
    if isinstance(value, float):
        return mp.mpf(value)
    # sympy numbers and friends
    try:
        import sympy as sp
        if isinstance(value, sp.Basic):
            value = sp.nsimplify(value) if value.is_Rational else value
            if value.is_Rational:
                return Fraction(int(value.p), int(value.q))
            return mp.mpf(str(sp.N(value, 45)))
    except ImportError:  # pragma: no cover
        pass
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    return mp.mpf(value)


def _promote(a, b):
    if isinstance(a, int):
        a = Fraction(a)
    if isinstance(b, int):
        b = Fraction(b)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a, b
    if isinstance(a, Fraction):
        a = mp.mpf(a.numerator) / a.denominator
    if isinstance(b, Fraction):
        b = mp.mpf(b.numerator) / b.denominator
    return a, b


def _add(a, b):
    a, b = _promote(a, b)
    return a + b


def _mul(a, b):
    a, b = _promote(a, b)
    return a * b


def _div(a, b):
    a, b = _promote(a, b)
    return a / b


def _is_zero(c) -> bool:
    return c == 0


class InversePowerSeries:
    """Truncated series in an inverse power variable ``u``.

    ``order`` is the highest power whose coefficient is trustworthy; the
    stored coefficient list always has ``order + 1`` entries.

    >>> s = InversePowerSeries([1, 1], order=2)
    >>> (s * InversePowerSeries([1, -1], order=2)).coefficients
    (Fraction(1, 1), Fraction(0, 1), Fraction(-1, 1))
    """

    __slots__ = ("_c", "_order")

    def __init__(self, coefficients: Iterable, order: int | None = None):
        coeffs = [to_coeff(c) for c in coefficients]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        coeffs = coeffs[:order + 1] + [Fraction(0)] * (order + 1 - len(coeffs))
        self._c = tuple(coeffs)
        self._order = int(order)

    # construction helpers

    @classmethod
    def constant(cls, value, order: int) -> "InversePowerSeries":
        return cls([value], order)

    @classmethod
    def monomial(cls, power: int, order: int, value=1) -> "InversePowerSeries":
        coeffs = [0] * (order + 1)
        if power <= order:
            coeffs[power] = value
        return cls(coeffs, order)

    # data access

    @property
    def order(self) -> int:
        return self._order

    @property
    def coefficients(self) -> tuple:
        return self._c

    def __getitem__(self, k: int):
        if not 0 <= k <= self._order:
            raise IndexError(f"coefficient {k} beyond truncation order {self._order}")
        return self._c[k]

    def __len__(self) -> int:
        return self._order + 1

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._c)

    @property
    def valuation(self) -> int:
        for k, c in enumerate(self._c):
            if not _is_zero(c):
                return k
        return self._order + 1

    def to_floats(self) -> list[float]:
        return [float(c) for c in self._c]

    def truncate(self, order: int) -> "InversePowerSeries":
        if order > self._order:
            raise ValueError("cannot extend a truncated series")
        return InversePowerSeries(self._c[:order + 1], order)

    def eval(self, u):
        """Partial sum at ``u`` (float in, float out; mpf in, mpf out)."""
        total = mp.mpf(0) if isinstance(u, _MPF) else 0.0
        for c in reversed(self._c):
            total = total * u + (c if isinstance(u, _MPF) else float(c))
        return total

    __call__ = eval

    def rescale(self, factor) -> "InversePowerSeries":
        """Substitute ``u -> factor*u``."""
        f = to_coeff(factor)
        out, p = [], Fraction(1)
        for c in self._c:
            out.append(_mul(c, p))
            p = _mul(p, f)
        return InversePowerSeries(out, self._order)

    # arithmetic

    def _lift(self, other) -> "InversePowerSeries":
        if isinstance(other, InversePowerSeries):
            return other
        return InversePowerSeries([other], self._order)

    def __add__(self, other):
        other = self._lift(other)
        K = min(self._order, other._order)
        return InversePowerSeries([_add(a, b) for a, b in zip(self._c[:K + 1], other._c[:K + 1])], K)

    __radd__ = __add__

    def __neg__(self):
        return InversePowerSeries([-c for c in self._c], self._order)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, InversePowerSeries):
            return self.scale(other)
        # error in a at power Ka+1 enters the product at Ka+1+val(b)
        K = min(self._order + other.valuation, other._order + self.valuation)
        a, b = self._c, other._c
        out = []
        for k in range(K + 1):
            acc = Fraction(0)
            for i in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
                acc = _add(acc, _mul(a[i], b[k - i]))
            out.append(acc)
        return InversePowerSeries(out, K)

    __rmul__ = __mul__

    def scale(self, factor) -> "InversePowerSeries":
        f = to_coeff(factor)
        return InversePowerSeries([_mul(c, f) for c in self._c], self._order)

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = InversePowerSeries([1], self._order)
        for _ in range(int(n)):
            result = result * self
        return result

    def __truediv__(self, other):
        if isinstance(other, InversePowerSeries):
            return quotient(self, other)
        return self.scale(_div(Fraction(1), to_coeff(other)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, InversePowerSeries):
            return NotImplemented
        K = min(self._order, other._order)
        return all(a == b for a, b in zip(self._c[:K + 1], other._c[:K + 1]))

    def __hash__(self):
        return hash((self._c, self._order))

    def max_abs_diff(self, other: "InversePowerSeries") -> float:
        K = min(self._order, other._order)
        return max((abs(float(_add(a, -b))) for a, b in zip(self._c[:K + 1], other._c[:K + 1])),
                   default=0.0)

    def __repr__(self) -> str:
        body = ", ".join(str(c) if isinstance(c, Fraction) else mp.nstr(c, 17) for c in self._c)
        return f"InversePowerSeries([{body}], order={self._order})"


# module-level operations

def add(a: InversePowerSeries, b) -> InversePowerSeries:
    return a + b


def mul(a: InversePowerSeries, b) -> InversePowerSeries:
    return a * b


def scale(a: InversePowerSeries, factor) -> InversePowerSeries:
    return a.scale(factor)


def quotient(numer: InversePowerSeries, denom: InversePowerSeries) -> InversePowerSeries:
    """Series division; the denominator must have a nonzero constant term."""
    if _is_zero(denom[0]):
        raise ZeroLeadingCoefficient("denominator has zero constant term")
    K = min(numer.order, denom.order + numer.valuation)
    n, d = numer.coefficients, denom.coefficients
    out = []
    for k in range(K + 1):
        acc = n[k] if k < len(n) else Fraction(0)
        for i in range(1, min(k, len(d) - 1) + 1):
            acc = _add(acc, -_mul(d[i], out[k - i]))
        out.append(_div(acc, d[0]))
    return InversePowerSeries(out, K)


def log1p_series(s: InversePowerSeries, order: int | None = None) -> InversePowerSeries:
    """``log(s)`` for a series with constant term 1."""
    c0 = s[0]
    if isinstance(c0, Fraction):
        unit = c0 == 1
    else:
        unit = abs(c0 - 1) <= _UNIT_TOL
    if not unit:
        raise NonUnitLeadingCoefficient(f"constant term is {c0}, expected 1")
    K = s.order if order is None else min(order, s.order)
    c = s.coefficients
    L = [Fraction(0)]
    for k in range(1, K + 1):
        acc = _mul(k, c[k])
        for j in range(1, k):
            acc = _add(acc, -_mul(_mul(j, L[j]), c[k - j]))
        L.append(_div(acc, k))
    return InversePowerSeries(L, K)


def exp_series(s: InversePowerSeries, order: int | None = None) -> InversePowerSeries:
    """``exp(s)``; exact when ``s`` is exact with zero constant term."""
    K = s.order if order is None else min(order, s.order)
    c = s.coefficients
    E = [Fraction(1) if _is_zero(c[0]) else mp.exp(_promote(c[0], Fraction(0))[0])]
    for k in range(1, K + 1):
        acc = Fraction(0)
        for j in range(1, k + 1):
            acc = _add(acc, _mul(_mul(j, c[j]), E[k - j]))
        E.append(_div(acc, k))
    return InversePowerSeries(E, K)


def from_floats(values: Sequence[float], order: int | None = None) -> InversePowerSeries:
    return InversePowerSeries([mp.mpf(v) for v in values], order)
