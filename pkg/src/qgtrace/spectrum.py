"""Eigenvalues of a quantum graph from a pole-free secular function.

Two scalar tools are combined:

* ``secular_function`` -- ``det(Theta - M(lam))`` times the product of the
  edge quantities whose zeros are the poles of ``M`` (``psi_t(l)`` for
  delta, ``theta_t'(l)`` for delta-prime).  It is evaluated as the
  determinant of the full ``2n x 2n`` linear system for the Cauchy data of
  every edge, which has no poles at all.
* ``eigenvalue_count`` -- the number of eigenvalues below ``lam``, obtained
  from the edge pole count plus the negative inertia of ``Theta - M(lam)``.
  A jump of ``j`` across a short interval means ``j`` eigenvalues inside it,
  which gives multiplicities without ever looking at the order of a zero.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .edge_solver import PruferEnd, dtn_from_end, ntd_from_end, prufer_transfer
from .errors import GridTooCoarse, InsufficientEigenvalues
from .graph import LEFT, MetricGraph
from .mmatrix import DELTA, MatchingScheme, assemble_from_blocks, resolve_potentials

REFINE_RTOL = 1e-12
REFINE_ATOL = 1e-14
SCAN_RTOL = 1e-10
SCAN_ATOL = 1e-12
CLUSTER_RTOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues (ascending) with multiplicities, all ``<= lambda_max``."""
    eigenvalues: tuple
    multiplicities: tuple
    lambda_max: float
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ev = tuple(float(x) for x in self.eigenvalues)
        mult = tuple(int(m) for m in self.multiplicities)
        if len(ev) != len(mult):
            raise ValueError("eigenvalues and multiplicities differ in length")
        if any(b < a for a, b in zip(ev, ev[1:])):
            raise ValueError("eigenvalues must be sorted")
        if any(m < 1 for m in mult):
            raise ValueError("multiplicities must be positive")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "multiplicities", mult)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def total_count(self) -> int:
        return sum(self.multiplicities)

    def with_multiplicity(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.repeat(np.asarray(self.eigenvalues), self.multiplicities)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "lambda", "multiplicity"])
        for i, (lam, m) in enumerate(zip(self.eigenvalues, self.multiplicities)):
            w.writerow([i, format(lam, ".17g"), m])
        return buf.getvalue()

    @classmethod
    def from_values(cls, values: Sequence[float], lambda_max: float,
                    rtol: float = 1e-7, atol: float = 1e-9, meta=None) -> "Spectrum":
        """Group nearly equal values into multiplicities."""
        vals = np.sort(np.asarray(values, dtype=float))
        ev, mult = [], []
        for v in vals:
            if ev and abs(v - ev[-1]) <= rtol * max(1.0, abs(v)) + atol:
                n = mult[-1]
                ev[-1] = (ev[-1] * n + v) / (n + 1)
                mult[-1] = n + 1
            else:
                ev.append(float(v))
                mult.append(1)
        return cls(tuple(ev), tuple(mult), float(lambda_max), meta or {})


# -- system layout -----------------------------------------------------------

@dataclass(frozen=True)
class _Layout:
    slots: tuple            # per vertex: tuple of (edge, end), first slot first
    continuity: tuple       # (vertex, first_slot, other_slot)
    det_j: int


@lru_cache(maxsize=64)
def _layout(graph: MetricGraph) -> _Layout:
    slots = tuple(tuple(graph.endpoints(v)) for v in range(graph.n_vertices))
    cont = tuple((v, s[0], o) for v, s in enumerate(slots) for o in s[1:])
    n2 = 2 * graph.n_edges
    N = graph.n_vertices
    J = np.zeros((n2, n2))
    for v, s in enumerate(slots):
        t, e = s[0]
        J[2 * t + e, v] = 1.0
    for r, (v, first, other) in enumerate(cont):
        t, e = other
        J[2 * t + e, v] = 1.0
        J[2 * t + e, N + r] = -1.0
    det_j = int(round(np.linalg.det(J)))
    if abs(det_j) != 1:  # pragma: no cover - structural
        raise RuntimeError("slot change of variables is not unimodular")
    return _Layout(slots, cont, det_j)


def _kind(scheme: MatchingScheme) -> str:
    return scheme.kind


def _check_scheme(graph: MetricGraph, scheme: MatchingScheme) -> None:
    if scheme.n_vertices != graph.n_vertices:
        raise ValueError(f"scheme has {scheme.n_vertices} couplings, graph has "
                         f"{graph.n_vertices} vertices")


def _ends(pots, lams, rtol, atol) -> list[PruferEnd]:
    return [prufer_transfer(p, lams, rtol, atol) for p in pots]


def _system_matrix(graph: MetricGraph, scheme: MatchingScheme, ends: list[PruferEnd],
                   i: int = 0) -> np.ndarray:
    """The ``2n x 2n`` matrix acting on ``(y_t(0), y_t'(0))`` for sample ``i``."""
    lay = _layout(graph)
    n2 = 2 * graph.n_edges
    val = np.zeros((n2, n2))   # rows: slot value as function of Cauchy data
    dn = np.zeros((n2, n2))    # rows: slot normal derivative
    for t, end in enumerate(ends):
        pv, pd = end.psi(shift=0.0)
        tv, td = end.theta(shift=0.0)
        val[2 * t, 2 * t] = 1.0
        dn[2 * t, 2 * t + 1] = 1.0
        val[2 * t + 1, 2 * t] = tv[i]
        val[2 * t + 1, 2 * t + 1] = pv[i]
        dn[2 * t + 1, 2 * t] = -td[i]
        dn[2 * t + 1, 2 * t + 1] = -pd[i]
    C = np.zeros((n2, n2))
    alphas = scheme.alphas
    for v, s in enumerate(lay.slots):
        t0, e0 = s[0]
        for t, e in s:
            C[v] += (dn if scheme.kind == DELTA else val)[2 * t + e]
        C[v] -= alphas[v] * (val if scheme.kind == DELTA else dn)[2 * t0 + e0]
    cont = val if scheme.kind == DELTA else dn
    for r, (v, first, other) in enumerate(lay.continuity):
        C[graph.n_vertices + r] = cont[2 * first[0] + first[1]] - cont[2 * other[0] + other[1]]
    return C


def _boundary_minus_m(graph, scheme, ends, check=False) -> np.ndarray:
    """``Theta - M(lam)`` for every sample, shape ``(n_lams, N, N)``."""
    if scheme.kind == DELTA:
        blocks = np.stack([dtn_from_end(e, check) for e in ends])
    else:
        blocks = np.stack([-ntd_from_end(e, check) for e in ends])
    M = assemble_from_blocks(graph, blocks)
    return scheme.boundary_operator()[None, :, :] - M


def _pole_logs(scheme, ends):
    """Per-sample (sign, log|.|) of the product of pole-clearing edge factors."""
    sign = np.ones(ends[0].lam.size)
    logs = np.zeros(ends[0].lam.size)
    for e in ends:
        if scheme.kind == DELTA:
            f = np.sin(e.psi_angle) / e.s
            amp = e.psi_logamp
        else:
            f = np.cos(e.theta_angle)
            amp = e.theta_logamp
        sign *= np.sign(f)
        logs += amp + np.log(np.abs(f))
    return sign, logs


def spectral_floor(graph: MetricGraph, potentials) -> float:
    pots = resolve_potentials(graph, potentials)
    return min(p.bounds[0] for p in pots)


def log_secular(graph: MetricGraph, potentials, scheme: MatchingScheme, lam: float,
                rtol: float = REFINE_RTOL, atol: float = REFINE_ATOL) -> tuple[float, float]:
    """``(sign, log|F|)`` of the secular function; safe for very negative ``lam``."""
    _check_scheme(graph, scheme)
    pots = resolve_potentials(graph, potentials)
    ends = _ends(pots, [lam], rtol, atol)
    if lam < spectral_floor(graph, pots) - 1.0:
        T = _boundary_minus_m(graph, scheme, ends)[0]
        s_det, l_det = np.linalg.slogdet(T)
        s_p, l_p = _pole_logs(scheme, ends)
        return float(s_det * s_p[0]), float(l_det + l_p[0])
    C = _system_matrix(graph, scheme, ends)
    s_det, l_det = np.linalg.slogdet(C)
    factor = _layout(graph).det_j * ((-1) ** graph.n_vertices if scheme.kind == DELTA else 1)
    return float(s_det * factor), float(l_det)


def secular_function(graph: MetricGraph, potentials, scheme: MatchingScheme, lam: float,
                     rtol: float = REFINE_RTOL, atol: float = REFINE_ATOL) -> float:
    """Real-analytic function of ``lam`` vanishing exactly on the spectrum.

    Equals ``det(B - M(lam)) * prod_t psi_t(l_t)`` for delta couplings and
    ``det(-B - M'(lam)) * prod_t theta_t'(l_t)`` for delta-prime couplings.
    """
    sign, logabs = log_secular(graph, potentials, scheme, lam, rtol, atol)
    if sign == 0:
        return 0.0
    return sign * math.exp(min(logabs, 709.0)) if logabs < 709.0 else sign * math.inf


# -- counting ------------------------------------------------------------------

def lower_bound(graph: MetricGraph, potentials, scheme: MatchingScheme) -> float:
    """A value strictly below the whole spectrum and below every edge pole."""
    _check_scheme(graph, scheme)
    qmin = spectral_floor(graph, potentials)
    lmin = float(graph.lengths.min())
    penalty = 0.0
    if scheme.kind == DELTA:
        neg = [-a for a in scheme.alphas if a < 0]
        if neg:
            a = max(neg)
            eps = min(lmin / 2, 1.0 / (2 * a))
            penalty = 2 * a / eps
    else:
        gam = graph.valences
        for v, a in enumerate(scheme.alphas):
            if a < 0:
                c = gam[v] / abs(a)
                eps = min(lmin / 2, 1.0 / (2 * c))
                penalty = max(penalty, 2 * c / eps)
    return qmin - penalty - 1.0


def _counts(graph, pots, scheme, lams, rtol, atol, offset=0) -> np.ndarray:
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    ends = _ends(pots, lams, rtol, atol)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        T = _boundary_minus_m(graph, scheme, ends)
    T = np.nan_to_num(0.5 * (T + np.swapaxes(T, 1, 2)), nan=0.0, posinf=1e300, neginf=-1e300)
    neg = (np.linalg.eigvalsh(T) < 0).sum(axis=1)
    poles = sum((e.dirichlet_count() if scheme.kind == DELTA else e.neumann_count())
                for e in ends)
    return poles + neg - offset


class _Counter:
    def __init__(self, graph, pots, scheme, rtol=SCAN_RTOL, atol=SCAN_ATOL):
        self.graph, self.pots, self.scheme = graph, pots, scheme
        self.rtol, self.atol = rtol, atol
        self.low = lower_bound(graph, pots, scheme)
        self.offset = int(_counts(graph, pots, scheme, [self.low], rtol, atol)[0])

    def __call__(self, lams) -> np.ndarray:
        return _counts(self.graph, self.pots, self.scheme, lams, self.rtol, self.atol,
                       self.offset)


def eigenvalue_count(graph: MetricGraph, potentials, scheme: MatchingScheme, lams,
                     rtol: float = SCAN_RTOL, atol: float = SCAN_ATOL) -> np.ndarray:
    """Number of eigenvalues (with multiplicity) strictly below each ``lam``."""
    _check_scheme(graph, scheme)
    pots = resolve_potentials(graph, potentials)
    return _Counter(graph, pots, scheme, rtol, atol)(lams)


def _kappa(lam):
    return np.sign(lam) * np.sqrt(np.abs(lam))


def _lam(kappa):
    return np.sign(kappa) * kappa ** 2


def _refine(counter: _Counter, F, a: float, b: float, na: int, nb: int, out: list,
            depth: int = 0) -> None:
    """Locate the ``nb - na`` eigenvalues in ``(a, b)``."""
    jump = nb - na
    if jump <= 0:
        return
    width = b - a
    if jump == 1:
        fa, fb = F(a), F(b)
        if fa == 0.0:
            out.append((a, 1))
            return
        if fb == 0.0:
            out.append((b, 1))
            return
        if np.sign(fa) != np.sign(fb):
            root = brentq(F, a, b, xtol=1e-14 * max(1.0, abs(a)), rtol=4 * np.finfo(float).eps,
                          maxiter=200)
            out.append((root, 1))
            return
    if width <= CLUSTER_RTOL * max(1.0, abs(a)) or depth > 60:
        out.append((0.5 * (a + b), jump))
        return
    pts = np.linspace(a, b, 18)[1:-1]
    cnt = np.maximum.accumulate(np.concatenate([[na], counter(pts), [nb]]))
    cnt = np.minimum(cnt, nb)
    xs = np.concatenate([[a], pts, [b]])
    for i in range(len(xs) - 1):
        if cnt[i + 1] > cnt[i]:
            _refine(counter, F, xs[i], xs[i + 1], int(cnt[i]), int(cnt[i + 1]), out, depth + 1)


def compute_spectrum(graph: MetricGraph, potentials, scheme: MatchingScheme,
                     lambda_max: float, grid_density: float = 4.0,
                     retries: int = 3) -> Spectrum:
    """All eigenvalues below ``lambda_max`` with multiplicities.

    ``grid_density`` is the number of scan points per mean eigenvalue
    spacing in ``kappa = sign(lam) sqrt(|lam|)``.
    """
    _check_scheme(graph, scheme)
    if not math.isfinite(lambda_max):
        raise ValueError("lambda_max must be finite")
    if not grid_density > 0:
        raise ValueError("grid_density must be positive")
    pots = resolve_potentials(graph, potentials)
    counter = _Counter(graph, pots, scheme)
    low = counter.low
    if lambda_max <= low:
        return Spectrum((), (), lambda_max)
    refine_counter = _Counter(graph, pots, scheme, REFINE_RTOL, REFINE_ATOL)

    def F(lam):
        return secular_function(graph, pots, scheme, lam)

    k_low, k_max = float(_kappa(low)), float(_kappa(lambda_max))
    density = grid_density
    for attempt in range(retries + 1):
        step = math.pi / (graph.total_length * density)
        n = max(8, int(math.ceil((k_max - k_low) / step)) + 1)
        frac = (math.sqrt(2) - 1) * (attempt + 1) % 1.0
        ks = np.linspace(k_low, k_max, n)
        ks[1:-1] += frac * (ks[1] - ks[0]) * 0.5
        lams = _lam(ks)
        counts = counter(lams)
        if counts[0] == 0 and np.all(np.diff(counts) >= 0):
            break
        density *= 2
    else:
        raise GridTooCoarse("eigenvalue count is not monotone on the scan grid; "
                            "increase grid_density")

    found: list = []
    for i in np.flatnonzero(np.diff(counts)):
        _refine(refine_counter, F, float(lams[i]), float(lams[i + 1]),
                int(counts[i]), int(counts[i + 1]), found)
    found.sort()
    ev, mult = [], []
    for lam, m in found:
        if ev and abs(lam - ev[-1]) <= CLUSTER_RTOL * max(1.0, abs(lam)):
            mult[-1] += m
        else:
            ev.append(float(lam))
            mult.append(int(m))
    keep = [i for i, lam in enumerate(ev) if lam <= lambda_max]
    return Spectrum(tuple(ev[i] for i in keep), tuple(mult[i] for i in keep), lambda_max,
                    {"lower_bound": low, "grid_points": int(len(lams))})


def lowest_eigenvalue(graph: MetricGraph, potentials, scheme: MatchingScheme,
                      rtol: float = REFINE_RTOL, atol: float = REFINE_ATOL) -> float:
    """Ground state energy, bracketed by the counting function and refined on F."""
    _check_scheme(graph, scheme)
    pots = resolve_potentials(graph, potentials)
    counter = _Counter(graph, pots, scheme, rtol, atol)
    a = counter.low
    width = max(1.0, 0.25 * abs(a))
    b = a + width
    while counter([b])[0] == 0:
        a, b = b, b + width
        width *= 1.5
    found: list = []
    _refine(counter, lambda x: secular_function(graph, pots, scheme, x, rtol, atol),
            a, b, 0, int(counter([b])[0]), found)
    return min(lam for lam, _ in found)


def isospectral(spec1: Spectrum, spec2: Spectrum, count: int, tol: float) -> tuple[bool, float]:
    """Compare the first ``count`` eigenvalues (with multiplicity).

    Returns ``(agree, max_deviation)`` where the deviation is measured as
    ``|a - b| / max(1, |a|)``.
    """
    a, b = spec1.with_multiplicity(), spec2.with_multiplicity()
    if len(a) < count or len(b) < count:
        raise InsufficientEigenvalues(
            f"need {count} eigenvalues, have {len(a)} and {len(b)}")
    a, b = a[:count], b[:count]
    dev = np.abs(a - b) / np.maximum(1.0, np.abs(a))
    worst = float(dev.max()) if count else 0.0
    return bool(worst <= tol), worst
