"""Large-``tau`` expansions at ``lam = -tau**2``.

The growing solution of ``-y'' + q y = -tau**2 y`` has logarithmic
derivative

    w(x) = tau + sum_{n>=1} c_n(x) tau**(-n),
    c_1 = q / 2,   c_{n+1} = -(c_n' + sum_{a+b=n} c_a c_b) / 2,

(the Riccati equation ``w' + w**2 = q + tau**2`` order by order).  With
``u = 1/(2 tau)`` and ``C_n = int_0^l c_n`` the sine-type solution obeys

    psi(l)  ~ e^{tau l} * u * V(u),
    V(u)    = exp(sum_n C_n (2u)**n) / (1 + sum_{n odd} c_n(0) (2u)**(n+1)),
    psi'(l) ~ (e^{tau l} / 2) * D(u),
    D(u)    = V(u) * (1 + sum_n c_n(l) (2u)**(n+1)),

up to exponentially small terms.  The denominator of ``V`` comes from the
decaying companion solution needed to satisfy ``psi(0) = 0``.  Each C_n is
reduced by the same recursion to endpoint values plus integrals of
products of lower coefficients, so only ``q^{(n-2)}`` is ever needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy as sp

from .edge_solver import SpectralParameter
from .errors import InsufficientSmoothness
from .graph import LEFT, MetricGraph
from .mmatrix import mmatrix_batch, resolve_potentials
from .potentials import X, EdgePotential
from .series import InversePowerSeries, _add, _mul, exp_series, mp, quotient, to_coeff

VERIFY_RTOL = 1e-12
VERIFY_ATOL = 1e-14


def _require(p: EdgePotential, M: int) -> None:
    if M < 0:
        raise ValueError("expansion order must be nonnegative")
    if M >= 1 and p.smoothness_class < M - 1:
        raise InsufficientSmoothness(
            f"order {M} needs smoothness class {M - 1}, potential has {p.smoothness_class}")


def _riccati(q: sp.Expr, n_max: int) -> list[sp.Expr]:
    """``[None, c_1, ..., c_{n_max}]`` as expressions in ``x``."""
    c = [None, q / 2]
    for n in range(1, n_max):
        conv = sp.Add(*[c[a] * c[n - a] for a in range(1, n)])
        c.append(sp.expand(-(sp.diff(c[n], X) + conv) / 2))
    return c


def _endpoint_exprs(p: EdgePotential) -> tuple[sp.Expr, sp.Expr]:
    """Expressions agreeing with ``q`` near ``x = 0`` and near ``x = l``."""
    if p.piece is None:
        return p.expr, p.expr
    vals = p.piece.values
    return p.expr + sp.Float(vals[0], 17), p.expr + sp.Float(vals[-1], 17)


def _integrate(expr: sp.Expr, length: sp.Expr):
    expr = sp.expand(expr)
    if expr == 0:
        return Fraction(0)
    value = sp.integrate(expr, (X, 0, length))
    if value.has(sp.Integral):
        value = sp.N(sp.Integral(expr, (X, 0, length)), 45)
    return to_coeff(value)


@dataclass(frozen=True)
class EdgeCoefficients:
    """Riccati data of one edge: ``c_n(0)``, ``c_n(l)`` and ``C_n`` for ``n <= K``."""
    at_start: tuple
    at_end: tuple
    integrals: tuple


def riccati_coefficients(p: EdgePotential, K: int) -> EdgeCoefficients:
    """Exact (or 128-bit) coefficients needed for series through ``u**K``."""
    if K < 1:
        return EdgeCoefficients((), (), ())
    q0, ql = _endpoint_exprs(p)
    c0 = _riccati(q0, K)
    cl = _riccati(ql, K)
    L = p.length_exact
    start = tuple(to_coeff(sp.simplify(c0[n].subs(X, 0))) for n in range(1, K + 1))
    end = tuple(to_coeff(sp.simplify(cl[n].subs(X, L))) for n in range(1, K + 1))
    total = p.total_exact if p.piece is None else p.total
    integrals = [to_coeff(total) / 2]
    for n in range(1, K):
        conv = sp.Add(*[c0[a] * c0[n - a] for a in range(1, n)])
        if conv != 0 and p.piece is not None:
            raise InsufficientSmoothness("piecewise potentials support only the leading orders")
        jump = _add(end[n - 1], -start[n - 1])
        integrals.append(_mul(Fraction(-1, 2), _add(jump, _integrate(conv, L))))
    return EdgeCoefficients(start, end, tuple(integrals))


def _series_pair(coeffs: EdgeCoefficients, K: int):
    """``(V, D)`` through ``u**K``."""
    expo = [0] + [to_coeff(C) * 2 ** n for n, C in enumerate(coeffs.integrals, start=1)]
    V = exp_series(InversePowerSeries(expo[:K + 1], K))
    denom = [1] + [0] * K
    for n in range(1, K):
        if n % 2 == 1:
            denom[n + 1] = coeffs.at_start[n - 1] * 2 ** (n + 1)
    V = quotient(V, InversePowerSeries(denom, K))
    factor = [1, 0] + [coeffs.at_end[n - 1] * 2 ** (n + 1) for n in range(1, K)]
    D = V * InversePowerSeries(factor[:K + 1], K)
    return V, D


def psi_expansion(p: EdgePotential, M: int):
    """Series in ``u = 1/(2 tau)`` for the sine-type solution at ``x = l``.

    Returns ``(value, derivative)`` with

        psi(l, i tau)  ~ e^{tau l} / (2 tau) * value(u),
        psi'(l, i tau) ~ e^{tau l} / 2       * derivative(u),

    both through ``u**(M + 1)``.
    """
    _require(p, M)
    K = M + 1
    return _series_pair(riccati_coefficients(p, K), K)


def phi_expansion(p: EdgePotential, M: int):
    """Series for ``phi(0)``, ``phi'(0)`` with the same prefactors as :func:`psi_expansion`.

    ``phi(0) = -psi_r(l)`` and ``phi'(0) = psi_r'(l)`` where ``psi_r`` is the
    sine-type solution of the reflected potential ``q(l - x)``.
    """
    V, D = psi_expansion(p.reflected(), M)
    return -V, D


@dataclass(frozen=True)
class VertexAsymptotics:
    """``m_ii(tau) = -gamma*tau + 0 + sum_k delta_k tau**(-k) + o(tau**(-M))``.

    ``series`` holds ``m_ii / tau`` as a series in ``1/tau``: its constant
    term is ``-gamma``, the ``1/tau`` term vanishes and the term of power
    ``k + 1`` is ``delta_k``.
    """
    vertex: int
    gamma: int
    order: int
    series: InversePowerSeries = field(repr=False)

    @property
    def leading(self):
        return self.series[0]

    @property
    def constant_term(self):
        return self.series[1]

    @property
    def delta_exact(self) -> tuple:
        return tuple(self.series[k + 1] for k in range(1, self.order + 1))

    @property
    def delta_coeffs(self) -> tuple[float, ...]:
        return tuple(float(d) for d in self.delta_exact)

    def partial_sum(self, tau: float) -> float:
        return float(tau * self.series.eval(mp.mpf(1) / mp.mpf(tau)))

    def as_dict(self) -> dict:
        return {"vertex": self.vertex, "gamma": self.gamma, "order": self.order,
                "leading": float(self.leading), "constant": float(self.constant_term),
                "delta": list(self.delta_coeffs)}


def _endpoint_ratio(p: EdgePotential, M: int, end: int) -> InversePowerSeries:
    """Series ``r(u)`` with the edge's contribution to ``m_ii`` equal to ``-tau * r(u)``."""
    if end == LEFT:
        value, deriv = phi_expansion(p, M)
        return -quotient(deriv, value)
    value, deriv = psi_expansion(p, M)
    return quotient(deriv, value)


def vertex_asymptotics(graph: MetricGraph, potentials, vertex: int, M: int) -> VertexAsymptotics:
    """Expansion of the diagonal M-matrix entry of ``vertex`` through ``tau**(-M)``."""
    pots = resolve_potentials(graph, potentials)
    slots = graph.endpoints(vertex)
    gamma = len(slots)
    if M == 0:
        return VertexAsymptotics(vertex, gamma, 0, InversePowerSeries([-gamma, 0], 1))
    total = InversePowerSeries([0], M + 1)
    for t, end in slots:
        total = total + _endpoint_ratio(pots[t], M, end)
    # m/tau = -total(u), u = v/2
    return VertexAsymptotics(vertex, gamma, M, (-total).rescale(Fraction(1, 2)))


def all_vertex_asymptotics(graph: MetricGraph, potentials, M: int) -> list[VertexAsymptotics]:
    return [vertex_asymptotics(graph, potentials, v, M) for v in range(graph.n_vertices)]


@dataclass
class ExpansionReport:
    vertex: int
    order: int
    taus: np.ndarray
    numeric: np.ndarray
    partial: np.ndarray
    residuals: np.ndarray
    slope: float

    def as_dict(self) -> dict:
        return {"vertex": self.vertex, "order": self.order, "tau": self.taus.tolist(),
                "numeric": self.numeric.tolist(), "partial_sum": self.partial.tolist(),
                "residual": self.residuals.tolist(), "slope": self.slope}


def diagonal_entries(graph: MetricGraph, potentials, taus: Sequence[float],
                     rtol: float = VERIFY_RTOL, atol: float = VERIFY_ATOL) -> np.ndarray:
    """Numeric ``m_ii(-tau**2)`` for every tau, shape ``(len(taus), N)``."""
    taus = np.asarray(taus, dtype=float)
    M = mmatrix_batch(graph, potentials, -taus ** 2, "delta", rtol, atol)
    return np.diagonal(M, axis1=1, axis2=2).copy()


def verify_expansion(graph: MetricGraph, potentials, vertex: int, M: int,
                     tau_grid: Sequence[float]) -> ExpansionReport:
    """Scaled residuals ``|m_num - partial sum| * tau**M`` and their log-log slope."""
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(taus) <= 0) or np.any(taus < 10):
        raise ValueError("tau grid must be increasing with entries >= 10")
    va = vertex_asymptotics(graph, potentials, vertex, M)
    numeric = diagonal_entries(graph, potentials, taus)[:, vertex]
    partial = np.array([va.partial_sum(t) for t in taus])
    resid = np.abs(numeric - partial) * taus ** M
    slope = math.nan
    ok = resid > 0
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(taus[ok]), np.log(resid[ok]), 1)[0])
    return ExpansionReport(vertex, M, taus, numeric, partial, resid, slope)


def psi_numeric_ratio(p: EdgePotential, tau: float, rtol: float = VERIFY_RTOL,
                      atol: float = VERIFY_ATOL) -> tuple[float, float]:
    """``(2 tau e^{-tau l} psi(l), 2 e^{-tau l} psi'(l))`` from the edge solver."""
    from .edge_solver import prufer_transfer
    end = prufer_transfer(p, [SpectralParameter.from_tau(tau).lam], rtol, atol)
    v, d = end.psi()
    return float(2 * tau * v[0]), float(2 * d[0])
