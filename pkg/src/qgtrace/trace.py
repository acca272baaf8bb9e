"""Trace identities for isospectral delta couplings and coupling recovery.

For ``lam = -tau**2`` and ``u = 1/tau``,

    alpha_i - m_ii(tau) = gamma_i * tau * (1 + y_i(u)),
    y_i(u) = (alpha_i/gamma_i) u - sum_k (delta_k^(i)/gamma_i) u^(k+1) + ...,

so isospectral couplings share every Taylor coefficient of
``sum_i log(1 + y_i)`` through ``u**(M+1)`` (the determinant ratio of the two
``B - M`` matrices is identically one).  :func:`trace_sum_oracle` computes
those coefficients with series arithmetic.  :func:`trace_sum` evaluates the
closed multinomial form ``sum_m [u^s] y**m`` term by term.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import KindMismatch, NoBracket, OrderOutOfRange
from .graph import MetricGraph
from .mmatrix import DELTA, DELTA_PRIME, MatchingScheme, mmatrix_batch, resolve_potentials
from .series import InversePowerSeries, _add, _div, _mul, log1p_series, to_coeff
from .spectrum import Spectrum, compute_spectrum, lowest_eigenvalue


# -- multinomial form ----------------------------------------------------------

@lru_cache(maxsize=None)
def weighted_compositions(s: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """All ``(j_1..j_parts) >= 0`` with ``sum_p p * j_p == s``."""
    out = []

    def rec(p, remaining, acc):
        if p > parts:
            if remaining == 0:
                out.append(tuple(acc))
            return
        for j in range(remaining // p + 1):
            rec(p + 1, remaining - p * j, acc + [j])

    rec(1, s, [])
    return tuple(out)


def _check_order(asympt, s: int, M: int) -> None:
    if not 1 <= s <= M + 1:
        raise OrderOutOfRange(f"s = {s} outside 1..{M + 1}")
    for va in asympt:
        if va.order < M:
            raise OrderOutOfRange(
                f"vertex {va.vertex} expanded to order {va.order} < {M}")


def _vertex_inputs(alphas, asympt, M):
    if len(alphas) != len(asympt):
        raise ValueError("one coupling constant per vertex expansion is required")
    for a, va in zip(alphas, asympt):
        yield to_coeff(a), Fraction(va.gamma), [to_coeff(d) for d in va.delta_exact[:M]]


def trace_terms(alphas: Sequence[float], asympt, s: int, M: int) -> dict[int, object]:
    """Contributions to :func:`trace_sum` grouped by ``m = j_1 + ... + j_{M+1}``."""
    _check_order(asympt, s, M)
    terms: dict[int, object] = {}
    for alpha, gamma, deltas in _vertex_inputs(alphas, asympt, M):
        xs = [alpha] + deltas
        for js in weighted_compositions(s, M + 1):
            m = sum(js)
            coeff = Fraction(math.factorial(m) * (-1) ** (m - js[0]),
                             math.prod(math.factorial(j) for j in js))
            term = _div(coeff, gamma ** m)
            for x, j in zip(xs, js):
                if j:
                    term = _mul(term, x ** j)
            terms[m] = _add(terms.get(m, Fraction(0)), term)
    return dict(sorted(terms.items()))


def trace_sum_exact(alphas, asympt, s: int, M: int):
    total = Fraction(0)
    for v in trace_terms(alphas, asympt, s, M).values():
        total = _add(total, v)
    return total


def trace_sum(alphas: Sequence[float], asympt, s: int, M: int) -> float:
    """Multinomial trace sum over vertices for one power ``s``."""
    return float(trace_sum_exact(alphas, asympt, s, M))


def _y_series(alpha, gamma, deltas, M) -> InversePowerSeries:
    coeffs = [0, _div(alpha, gamma)] + [_div(-d, gamma) for d in deltas]
    return InversePowerSeries(coeffs, M + 1)


def log_series(alphas, asympt, M: int) -> InversePowerSeries:
    """``sum_i log(1 + y_i(u))`` through ``u**(M+1)``."""
    total = InversePowerSeries([0], M + 1)
    for alpha, gamma, deltas in _vertex_inputs(alphas, asympt, M):
        total = total + log1p_series(1 + _y_series(alpha, gamma, deltas, M))
    return total


def trace_sum_oracle_exact(alphas, asympt, s: int, M: int):
    _check_order(asympt, s, M)
    return log_series(alphas, asympt, M)[s]


def trace_sum_oracle(alphas: Sequence[float], asympt, s: int, M: int) -> float:
    """Coefficient of ``u**s`` in ``sum_i log(1 + y_i(u))``."""
    return float(trace_sum_oracle_exact(alphas, asympt, s, M))


def graded_log_terms(alphas, asympt, s: int, M: int) -> dict[int, object]:
    """``[u^s] y^m`` summed over vertices, computed by series powers (no multinomials)."""
    _check_order(asympt, s, M)
    out: dict[int, object] = {}
    for alpha, gamma, deltas in _vertex_inputs(alphas, asympt, M):
        y = _y_series(alpha, gamma, deltas, M)
        power = InversePowerSeries([1], M + 1)
        for m in range(1, s + 1):
            power = power * y
            if power.order >= s and power[s] != 0:
                out[m] = _add(out.get(m, Fraction(0)), power[s])
    return dict(sorted(out.items()))


def normalization_table(max_s: int = 6) -> dict[int, Fraction]:
    """Per-``s`` ratio ``trace_sum / trace_sum_oracle`` fixed on coupling-only input.

    With all ``delta`` zero both sides reduce to powers of ``alpha/gamma``,
    which pins the ratio down symbolically: ``(-1)**(s+1) * s``.
    """
    from .asymptotics import VertexAsymptotics
    table = {}
    va = VertexAsymptotics(0, 1, max_s, InversePowerSeries([-1] + [0] * (max_s + 1)))
    for s in range(1, max_s + 1):
        ts = trace_sum_exact([Fraction(1)], [va], s, max_s)
        orc = trace_sum_oracle_exact([Fraction(1)], [va], s, max_s)
        table[s] = _div(ts, orc)
    return table


NORMALIZATION = normalization_table()


# -- reports -------------------------------------------------------------------

@dataclass
class TraceReport:
    order: int
    lhs: list
    rhs: list

    @property
    def residuals(self) -> list[float]:
        return [abs(a - b) for a, b in zip(self.lhs, self.rhs)]

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    def as_dict(self) -> dict:
        return {"order": self.order,
                "entries": [{"s": s, "lhs": a, "rhs": b, "residual": r}
                            for s, (a, b, r) in enumerate(
                                zip(self.lhs, self.rhs, self.residuals), start=1)]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _alphas_of(scheme) -> tuple:
    if isinstance(scheme, MatchingScheme):
        return scheme.alphas
    return tuple(float(a) for a in scheme)


def check_trace(schemeA: MatchingScheme, schemeB: MatchingScheme, asympt, M: int) -> TraceReport:
    """Both sides of every trace identity ``s = 1..M+1``."""
    for sch in (schemeA, schemeB):
        if isinstance(sch, MatchingScheme) and sch.kind != DELTA:
            raise KindMismatch("trace identities are stated for delta couplings")
    a, b = _alphas_of(schemeA), _alphas_of(schemeB)
    la, lb = log_series(a, asympt, M), log_series(b, asympt, M)
    for s in range(1, M + 2):
        _check_order(asympt, s, M)
    lhs = [float(la[s]) for s in range(1, M + 2)]
    rhs = [float(lb[s]) for s in range(1, M + 2)]
    return TraceReport(M, lhs, rhs)


# -- determinant ratio -------------------------------------------------------

def _boundary(B, kind: str | None = None) -> tuple[np.ndarray, str]:
    if isinstance(B, MatchingScheme):
        return B.boundary_operator(), B.kind
    arr = np.asarray(B, dtype=float)
    if arr.ndim == 1:
        arr = np.diag(arr)
    return arr, kind or DELTA


@dataclass
class DetRatioScan:
    taus: np.ndarray
    ratios: np.ndarray

    def __iter__(self):
        return iter(zip(self.taus.tolist(), self.ratios.tolist()))

    def __len__(self):
        return len(self.taus)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "ratio"])
        for t, r in self:
            w.writerow([format(t, ".17g"), format(r, ".17g")])
        return buf.getvalue()


def det_ratio_scan(graph: MetricGraph, potentials, B1, B2, tau_grid: Sequence[float],
                   rtol: float = 1e-12, atol: float = 1e-14) -> DetRatioScan:
    """``det(B1 - M(-tau^2)) / det(B2 - M(-tau^2))`` along ``tau_grid``."""
    T1, k1 = _boundary(B1)
    T2, k2 = _boundary(B2, k1)
    if k1 != k2:
        raise KindMismatch("both couplings must use the same matching kind")
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(taus <= 0):
        raise ValueError("tau values must be positive")
    M = mmatrix_batch(graph, potentials, -taus ** 2, k1, rtol, atol)
    s1, l1 = np.linalg.slogdet(T1[None] - M)
    s2, l2 = np.linalg.slogdet(T2[None] - M)
    return DetRatioScan(taus, s1 * s2 * np.exp(l1 - l2))


# -- recovery ----------------------------------------------------------------

@dataclass
class Recovery:
    alpha: float
    target_lowest: float
    fitted_lowest: float
    max_deviation: float = math.nan
    evaluations: int = 0
    extra: dict = field(default_factory=dict)


def _uniform(kind: str, alpha: float, n: int) -> MatchingScheme:
    return MatchingScheme.uniform(kind, alpha, n)


def recover_uniform_alpha_report(graph: MetricGraph, potentials, target: Spectrum,
                                 search_interval: tuple[float, float] = (-5.0, 5.0),
                                 kind: str = DELTA, xtol: float = 1e-11,
                                 check_count: int = 3) -> Recovery:
    """Fit a uniform coupling constant to the lowest eigenvalue of ``target``."""
    kind = MatchingScheme(kind, ()).kind
    pots = resolve_potentials(graph, potentials)
    a, b = map(float, search_interval)
    if not a < b:
        raise ValueError("search interval must satisfy a < b")
    if len(target) == 0:
        raise NoBracket("target spectrum is empty")
    goal = target.eigenvalues[0]
    N = graph.n_vertices
    calls = [0]

    def mismatch(alpha):
        calls[0] += 1
        return lowest_eigenvalue(graph, pots, _uniform(kind, alpha, N)) - goal

    if kind == DELTA:
        fa, fb = mismatch(a), mismatch(b)
        if fa == 0:
            alpha = a
        elif fb == 0:
            alpha = b
        elif np.sign(fa) == np.sign(fb):
            raise NoBracket(f"first-eigenvalue mismatch keeps sign on [{a}, {b}]")
        else:
            alpha = brentq(mismatch, a, b, xtol=xtol, rtol=1e-14)
    else:
        alpha = _recover_delta_prime(mismatch, a, b, xtol, 1e-10 * max(1.0, abs(goal)))

    fitted = lowest_eigenvalue(graph, pots, _uniform(kind, alpha, N))
    rec = Recovery(float(alpha), goal, fitted, evaluations=calls[0])
    if check_count > 1 and target.total_count >= check_count:
        lam_top = target.with_multiplicity()[check_count - 1]
        ceiling = lam_top + 0.05 * max(1.0, abs(lam_top)) + 1.0
        fit = compute_spectrum(graph, pots, _uniform(kind, alpha, N), ceiling)
        got = fit.with_multiplicity()
        if len(got) >= check_count:
            want = target.with_multiplicity()[:check_count]
            rec.max_deviation = float(np.max(np.abs(got[:check_count] - want)
                                             / np.maximum(1.0, np.abs(want))))
    return rec


def _recover_delta_prime(mismatch, a: float, b: float, xtol: float,
                         zero_tol: float) -> float:
    """Root of the mismatch along ``eta = arctan(1/alpha)``.

    The ground state increases with ``1/alpha`` on each side of zero and
    ``alpha = 0`` is the supremum ``eta = pi/2``, so the search runs in
    ``eta`` where the dependence is monotone on ``(-pi/2, pi/2]``.
    """
    def eta_of(alpha):
        return math.pi / 2 if alpha == 0 else math.atan(1.0 / alpha)

    def alpha_of(eta):
        return 0.0 if eta >= math.pi / 2 else 1.0 / math.tan(eta)

    def g(eta):
        return mismatch(alpha_of(eta))

    pieces = []
    if a < 0 <= b or a <= 0 < b:
        f0 = mismatch(0.0)
        if abs(f0) <= zero_tol:
            return 0.0
        if a < 0 and f0 > 0:
            pieces.append(_negative_piece(g, eta_of(a), a))
        if b > 0:
            pieces.append((eta_of(b), math.pi / 2))
    else:
        lo, hi = sorted((eta_of(a), eta_of(b)))
        pieces.append((lo, hi))
    for lo, hi in pieces:
        glo, ghi = g(lo), g(hi)
        if glo == 0:
            return alpha_of(lo)
        if ghi == 0:
            return alpha_of(hi)
        if np.sign(glo) != np.sign(ghi):
            eta = brentq(g, lo, hi, xtol=xtol * 1e-2, rtol=1e-15)
            return alpha_of(eta)
    raise NoBracket(f"first-eigenvalue mismatch keeps sign on [{a}, {b}]")


def _negative_piece(g, eta_a: float, a: float) -> tuple[float, float]:
    """Bracket on ``alpha in [a, 0)``; the ground state tends to -inf as alpha -> 0-."""
    alpha = a
    for _ in range(12):
        alpha /= 10.0
        eta = math.atan(1.0 / alpha)
        if g(eta) < 0:
            return eta, eta_a
    return eta, eta_a


def recover_uniform_alpha(graph: MetricGraph, potentials, target: Spectrum,
                          search_interval: tuple[float, float] = (-5.0, 5.0),
                          kind: str = DELTA) -> float:
    """Uniform coupling constant reproducing ``target``'s ground state."""
    return recover_uniform_alpha_report(graph, potentials, target, search_interval, kind,
                                        check_count=0).alpha
