"""Closed-form edge potentials.

A potential on ``[0, l]`` is a sum of atoms: ``c*x**p``, ``c*cos(w*x + phi)``,
``c*exp(mu*x)`` and at most one piecewise-constant part.  The smooth atoms are
kept as sympy expressions so antiderivatives and derivatives of any order are
exact; the piecewise part is handled numerically and caps the smoothness
class at 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import sympy as sp

from .errors import (DerivativeOrderExceedsSmoothness, NonzeroMean,
                     OutOfDomain)

X = sp.Symbol("x", real=True)
_ZERO_TOL = 1e-12


def _sym(value) -> sp.Expr:
    if isinstance(value, float):
        # keep user floats as floats; exactness only for ints/rationals/strings
        return sp.Float(value, 17)
    return sp.sympify(value)


@dataclass(frozen=True)
class Polynomial:
    coeff: sp.Expr
    power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", _sym(self.coeff))
        if int(self.power) != self.power or self.power < 0:
            raise ValueError("polynomial power must be a nonnegative integer")
        object.__setattr__(self, "power", int(self.power))

    def expr(self) -> sp.Expr:
        return self.coeff * X ** self.power

    def reflect(self, length: sp.Expr) -> list:
        p = self.power
        return [Polynomial(self.coeff * sp.binomial(p, k) * length ** (p - k) * (-1) ** k, k)
                for k in range(p + 1)]


@dataclass(frozen=True)
class Cosine:
    coeff: sp.Expr
    freq: sp.Expr
    phase: sp.Expr = 0

    def __post_init__(self):
        for name in ("coeff", "freq", "phase"):
            object.__setattr__(self, name, _sym(getattr(self, name)))

    def expr(self) -> sp.Expr:
        return self.coeff * sp.cos(self.freq * X + self.phase)

    def reflect(self, length: sp.Expr) -> list:
        return [Cosine(self.coeff, -self.freq, self.freq * length + self.phase)]


@dataclass(frozen=True)
class Exponential:
    coeff: sp.Expr
    rate: sp.Expr

    def __post_init__(self):
        for name in ("coeff", "rate"):
            object.__setattr__(self, name, _sym(getattr(self, name)))

    def expr(self) -> sp.Expr:
        return self.coeff * sp.exp(self.rate * X)

    def reflect(self, length: sp.Expr) -> list:
        return [Exponential(self.coeff * sp.exp(self.rate * length), -self.rate)]


@dataclass(frozen=True)
class PiecewiseConstant:
    """``values[i]`` on ``[breakpoints[i-1], breakpoints[i])``; interior breakpoints only."""
    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(bps) + 1:
            raise ValueError("need len(values) == len(breakpoints) + 1")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    def reflect(self, length) -> list:
        l = float(length)
        return [PiecewiseConstant(tuple(l - b for b in reversed(self.breakpoints)),
                                  tuple(reversed(self.values)))]


Atom = Polynomial | Cosine | Exponential | PiecewiseConstant


@lru_cache(maxsize=512)
def _lambdify(expr: sp.Expr):
    return sp.lambdify(X, expr, "math")


def _merge_pieces(pieces: Sequence[PiecewiseConstant]) -> PiecewiseConstant | None:
    if not pieces:
        return None
    bps = sorted({b for p in pieces for b in p.breakpoints})
    mids = [bps[0] - 1.0] if bps else [0.0]
    mids += [0.5 * (a + b) for a, b in zip(bps, bps[1:])]
    if bps:
        mids.append(bps[-1] + 1.0)
    values = []
    for m in mids:
        values.append(sum(p.values[int(np.searchsorted(p.breakpoints, m, side="right"))]
                          for p in pieces))
    return PiecewiseConstant(tuple(bps), tuple(values))


class EdgePotential:
    """Real potential on one edge ``[0, length]``.

    ``smoothness`` caps the derivative order downstream code may use
    (``None`` means C-infinity).  Potentials with a piecewise-constant part
    are forced to smoothness class 0.
    """

    def __init__(self, length, terms: Sequence[Atom] = (), smoothness: int | None = None):
        self.length_exact = _sym(length)
        self.length = float(self.length_exact)
        if not self.length > 0:
            raise ValueError("edge length must be positive")
        self.terms = tuple(terms)
        smooth = [t for t in self.terms if not isinstance(t, PiecewiseConstant)]
        self._piece = _merge_pieces([t for t in self.terms if isinstance(t, PiecewiseConstant)])
        if self._piece is not None:
            if any(not 0 < b < self.length for b in self._piece.breakpoints):
                raise OutOfDomain("breakpoints must lie strictly inside the edge")
            if smoothness not in (None, 0):
                raise ValueError("piecewise-constant potentials have smoothness class 0")
            smoothness = 0
        self.expr = sp.expand(sp.Add(*[t.expr() for t in smooth])) if smooth else sp.Integer(0)
        for c in self.expr.free_symbols - {X}:
            raise ValueError(f"unexpected symbol {c} in potential")
        if smoothness is not None and smoothness < 0:
            raise ValueError("smoothness must be nonnegative")
        self.smoothness = smoothness
        self._check_real()

    # -- descriptors -------------------------------------------------------

    @property
    def smoothness_class(self) -> float:
        return math.inf if self.smoothness is None else self.smoothness

    @property
    def is_smooth(self) -> bool:
        return self._piece is None

    @property
    def breakpoints(self) -> tuple:
        return () if self._piece is None else self._piece.breakpoints

    @property
    def piece(self) -> PiecewiseConstant | None:
        return self._piece

    def __repr__(self) -> str:
        parts = [] if self.expr == 0 else [str(self.expr)]
        if self._piece is not None:
            parts.append(f"piecewise{self._piece.values}@{self._piece.breakpoints}")
        return f"EdgePotential(l={self.length:g}, q={' + '.join(parts) or '0'})"

    def _check_real(self):
        for xv in (0.0, 0.37 * self.length, self.length):
            val = complex(self.expr.subs(X, xv).evalf())
            if abs(val.imag) > 1e-12 * (1 + abs(val.real)):
                raise ValueError("potential must be real-valued")

    # -- numeric evaluation ------------------------------------------------

    @cached_property
    def _q_smooth(self):
        return sp.lambdify(X, self.expr, "math")

    @cached_property
    def _Q_expr(self) -> sp.Expr:
        t = sp.Symbol("t", real=True)
        return sp.integrate(self.expr.subs(X, t), (t, 0, X))

    @cached_property
    def _Q_smooth(self):
        return sp.lambdify(X, self._Q_expr, "math")

    def _check_x(self, x: float) -> float:
        x = float(x)
        tol = 1e-14 * max(1.0, self.length)
        if x < -tol or x > self.length + tol:
            raise OutOfDomain(f"x = {x} outside [0, {self.length}]")
        return min(max(x, 0.0), self.length)

    def _piece_value(self, x: float) -> float:
        if self._piece is None:
            return 0.0
        return self._piece.values[int(np.searchsorted(self._piece.breakpoints, x, side="right"))]

    def _piece_integral(self, x: float) -> float:
        if self._piece is None:
            return 0.0
        edges = (0.0,) + self._piece.breakpoints + (self.length,)
        total = 0.0
        for a, b, v in zip(edges, edges[1:], self._piece.values):
            if x <= a:
                break
            total += v * (min(x, b) - a)
        return total

    def eval_q(self, x: float) -> float:
        x = self._check_x(x)
        return float(self._q_smooth(x)) + self._piece_value(x)

    __call__ = eval_q

    def cumulative(self, x: float) -> float:
        """Q(x), the integral of q over [0, x]."""
        x = self._check_x(x)
        if x == 0.0:
            return 0.0
        if x == self.length:
            return self.total
        return float(self._Q_smooth(x)) + self._piece_integral(x)

    @cached_property
    def total(self) -> float:
        """Integral of q over the whole edge (exact when no piecewise part)."""
        if self._piece is None:
            return float(self.total_exact)
        return float(self._Q_smooth(self.length)) + self._piece_integral(self.length)

    def tail(self, x: float) -> float:
        """R(x), the integral of q over [x, l]."""
        x = self._check_x(x)
        if x == self.length:
            return 0.0
        return self.total - self.cumulative(x)

    @cached_property
    def total_exact(self) -> sp.Expr | None:
        """Exact integral over the edge, or None when a piecewise part is present."""
        if self._piece is not None:
            return None
        return sp.simplify(self._Q_expr.subs(X, self.length_exact))

    def has_zero_mean(self) -> bool:
        exact = self.total_exact
        if exact is not None and not exact.has(sp.Float):
            return sp.simplify(exact) == 0
        return abs(self.total) <= _ZERO_TOL

    def segments(self) -> list[tuple[float, float, float]]:
        """Integration segments ``(a, b, constant part of q on [a, b])``."""
        edges = (0.0,) + self.breakpoints + (self.length,)
        values = self._piece.values if self._piece is not None else (0.0,)
        return [(a, b, v) for a, b, v in zip(edges, edges[1:], values)]

    @cached_property
    def smooth_callable(self):
        """Scalar callable for the smooth part, or None if it vanishes."""
        if self.expr == 0:
            return None
        if not self.expr.has(X):
            c = float(self.expr)
            return lambda x: c
        return self._q_smooth

    @cached_property
    def bounds(self) -> tuple[float, float]:
        """Numeric (min, max) of q from a dense sample; used for spectral bounds."""
        xs = np.linspace(0.0, self.length, 4097)
        if self.breakpoints:
            bp = np.asarray(self.breakpoints)
            xs = np.concatenate([xs, bp, np.nextafter(bp, -np.inf)])
        vals = np.array([self.eval_q(x) for x in np.clip(xs, 0.0, self.length)])
        spread = float(vals.max() - vals.min())
        pad = 1e-3 * spread + 1e-12
        return float(vals.min()) - pad, float(vals.max()) + pad

    # -- exact derivative algebra -----------------------------------------

    @cached_property
    def _R_expr(self) -> sp.Expr:
        return sp.expand(self._Q_expr.subs(X, self.length_exact) - self._Q_expr)

    def _require_order(self, m: int) -> None:
        if m < 0:
            raise ValueError("derivative order must be nonnegative")
        if m > self.smoothness_class:
            raise DerivativeOrderExceedsSmoothness(
                f"order {m} exceeds smoothness class {self.smoothness_class}")

    @lru_cache(maxsize=None)
    def qj_expr(self, j: int, m: int) -> sp.Expr:
        """Exact m-th derivative of ``Q_j = Q**(j-1) * q`` (smooth part only)."""
        if j < 1:
            raise ValueError("j must be a positive integer")
        self._require_order(m)
        return sp.diff(self._Q_expr ** (j - 1) * self.expr, X, m)

    @lru_cache(maxsize=None)
    def rj_expr(self, j: int, m: int) -> sp.Expr:
        """Exact m-th derivative of ``R_j = R**(j-1) * q`` (smooth part only)."""
        if j < 1:
            raise ValueError("j must be a positive integer")
        self._require_order(m)
        return sp.diff(self._R_expr ** (j - 1) * self.expr, X, m)

    def qj_derivative(self, j: int, m: int, x: float) -> float:
        x = self._check_x(x)
        self._require_order(m)
        if self._piece is not None:
            return self.cumulative(x) ** (j - 1) * self.eval_q(x)
        return float(_lambdify(self.qj_expr(j, m))(x))

    def rj_derivative(self, j: int, m: int, x: float) -> float:
        x = self._check_x(x)
        self._require_order(m)
        if self._piece is not None:
            return self.tail(x) ** (j - 1) * self.eval_q(x)
        return float(_lambdify(self.rj_expr(j, m))(x))

    def zeromean_coeffs(self, M: int, exact: bool = False) -> tuple[dict, dict]:
        """Coefficients ``A[j, k]``, ``B[j, k]`` for ``1 <= j < k <= M + 1``.

        ``A[j, k] = (1/j) d^{k-j}/dx^{k-j} Q(x)**j`` at ``x = l`` and
        ``B[j, k] = -(1/j) d^{k-j}/dx^{k-j} R(x)**j`` at ``x = 0``.
        """
        if M < 1:
            raise ValueError("M must be at least 1")
        if not self.has_zero_mean():
            raise NonzeroMean(f"potential has mean {self.total / self.length:.3e}")
        self._require_order(M - 1)
        A, B = {}, {}
        for k in range(2, M + 2):
            for j in range(1, k):
                a = sp.diff(self._Q_expr ** j, X, k - j).subs(X, self.length_exact) / j
                b = -sp.diff(self._R_expr ** j, X, k - j).subs(X, 0) / j
                a, b = sp.simplify(a), sp.simplify(b)
                A[j, k] = a if exact else float(a)
                B[j, k] = b if exact else float(b)
        return A, B

    # -- transformations ---------------------------------------------------

    @cached_property
    def _reflected(self) -> "EdgePotential":
        atoms = []
        for t in self.terms:
            atoms.extend(t.reflect(self.length_exact))
        return EdgePotential(self.length_exact, atoms, self.smoothness)

    def reflected(self) -> "EdgePotential":
        """Potential ``q(l - x)`` on the same edge."""
        return self._reflected

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


# module-level spellings of the operations

def eval_q(p: EdgePotential, x: float) -> float:
    return p.eval_q(x)


def cumulative(p: EdgePotential, x: float) -> float:
    return p.cumulative(x)


def tail(p: EdgePotential, x: float) -> float:
    return p.tail(x)


def qj_derivative(p: EdgePotential, j: int, m: int, x: float) -> float:
    return p.qj_derivative(j, m, x)


def rj_derivative(p: EdgePotential, j: int, m: int, x: float) -> float:
    return p.rj_derivative(j, m, x)


def zeromean_coeffs(p: EdgePotential, M: int, exact: bool = False):
    return p.zeromean_coeffs(M, exact)


def zero(length) -> EdgePotential:
    return EdgePotential(length)


def constant(length, value) -> EdgePotential:
    return EdgePotential(length, [Polynomial(value, 0)])


def cosine(length, coeff=1, freq="2*pi", phase=0) -> EdgePotential:
    return EdgePotential(length, [Cosine(coeff, freq, phase)])


def piecewise(length, breakpoints, values) -> EdgePotential:
    return EdgePotential(length, [PiecewiseConstant(tuple(breakpoints), tuple(values))])
