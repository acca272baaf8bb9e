"""Fundamental solutions of ``-y'' + q y = lam y`` on one edge.

The integration runs in modified Prüfer variables

    y = rho * sin(theta) / s,    y' = rho * cos(theta),

with ``s = sqrt(|lam|)`` once ``|lam| > 1`` (else 1).  The angle stays
bounded and the amplitude is carried as ``log(rho)``, so exponential growth
``e^{tau x}`` for ``lam = -tau**2`` turns into linear growth of ``log(rho)``
and nothing overflows.  Values handed out are multiplied by ``e^{-sigma}``
with ``sigma = tau * l`` in the exponential regime (``sigma = 0`` otherwise).

Two solutions are integrated together: the sine-type ``psi`` (``psi(0)=0``,
``psi'(0)=1``) and the cosine-type ``theta`` (``theta(0)=1``,
``theta'(0)=0``).  Every quantity on the edge follows from those four
numbers at ``x = l``; ``phi`` (``phi(l)=0``, ``phi'(l)=1``) is integrated
independently on the reflected potential so that the Wronskian identity
``phi(0) = -psi(l)`` is a genuine check.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import ode

from .errors import DirichletEigenvalue, IntegratorFailure, NeumannEigenvalue
from .potentials import EdgePotential

RTOL = 1e-10
ATOL = 1e-12
POLE_TOL = 1e-10


@dataclass(frozen=True)
class SpectralParameter:
    """Real spectral parameter ``lam`` with ``k = sqrt(lam)``, ``Im k >= 0``."""
    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not math.isfinite(lam):
            raise ValueError("spectral parameter must be finite")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_tau(cls, tau: float) -> "SpectralParameter":
        if tau <= 0:
            raise ValueError("tau must be positive")
        return cls(-float(tau) ** 2)

    @classmethod
    def from_k(cls, k: float) -> "SpectralParameter":
        return cls(float(k) ** 2)

    @property
    def k(self) -> complex:
        if self.lam >= 0:
            return complex(math.sqrt(self.lam), 0.0)
        return complex(0.0, math.sqrt(-self.lam))

    @property
    def tau(self) -> float | None:
        return math.sqrt(-self.lam) if self.lam < 0 else None

    @property
    def regime(self) -> str:
        return "exponential" if self.lam < 0 else "oscillatory"

    def scale_exponent(self, length: float) -> float:
        return math.sqrt(-self.lam) * length if self.lam < 0 else 0.0


def _as_lambda(sp) -> float:
    return sp.lam if isinstance(sp, SpectralParameter) else float(sp)


@dataclass(frozen=True)
class PruferEnd:
    """Prüfer data at ``x = l`` for a batch of spectral parameters."""
    lam: np.ndarray
    s: np.ndarray
    psi_angle: np.ndarray
    psi_logamp: np.ndarray
    theta_angle: np.ndarray
    theta_logamp: np.ndarray
    length: float

    @property
    def sigma(self) -> np.ndarray:
        return np.where(self.lam < 0, np.sqrt(np.abs(self.lam)) * self.length, 0.0)

    def _values(self, angle, logamp, shift):
        amp = np.exp(logamp - shift)
        return amp * np.sin(angle) / self.s, amp * np.cos(angle)

    def psi(self, shift=None):
        """``(psi(l), psi'(l))`` times ``e^{-shift}`` (default shift: sigma)."""
        return self._values(self.psi_angle, self.psi_logamp,
                            self.sigma if shift is None else shift)

    def theta(self, shift=None):
        return self._values(self.theta_angle, self.theta_logamp,
                            self.sigma if shift is None else shift)

    def wronskian(self) -> np.ndarray:
        """``theta*psi' - theta'*psi`` at ``l``; identically 1 in exact arithmetic.

        Formed from the angle difference, so its absolute error is about
        ``eps * wronskian_amplification()``.
        """
        return (np.exp(self.psi_logamp + self.theta_logamp)
                * np.sin(self.theta_angle - self.psi_angle) / self.s)

    def wronskian_amplification(self) -> np.ndarray:
        """Product of the two amplitudes over ``s``; grows like ``e^{2 tau l}`` for ``lam < 0``."""
        return np.exp(self.psi_logamp + self.theta_logamp) / self.s

    def dirichlet_count(self) -> np.ndarray:
        """Number of Dirichlet eigenvalues of the edge strictly below ``lam``."""
        return np.floor(self.psi_angle / np.pi).astype(int)

    def neumann_count(self) -> np.ndarray:
        return np.floor(self.theta_angle / np.pi + 0.5).astype(int)


def _scale(lam: np.ndarray) -> np.ndarray:
    return np.where(np.abs(lam) > 1.0, np.sqrt(np.abs(lam)), 1.0)


def _constant_step(mu: np.ndarray, s: np.ndarray, length: float, angle: np.ndarray,
                   logamp: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact Prüfer update across a segment where ``lam - q`` equals ``mu``.

    The end state comes from the closed-form solution with the amplitude
    factored out; the angle is rebuilt from its residue mod pi plus the
    number of zeros of ``y`` met inside the segment.
    """
    y0, d0 = np.sin(angle) / s, np.cos(angle)
    osc = mu > 0
    w = np.sqrt(np.abs(mu))
    # oscillatory: y = y0 cos(wx) + d0 sin(wx)/w
    wl = w * length
    cos_, sin_ = np.cos(wl), np.sin(wl)
    sinc_l = length * np.sinc(wl / np.pi)
    yo = y0 * cos_ + d0 * sinc_l
    do = -y0 * w * sin_ + d0 * cos_
    phase = np.arctan2(w * y0, d0)
    zeros_o = np.floor((phase + wl) / np.pi) - np.floor(phase / np.pi)
    # exponential or linear: everything divided by e^{w l}
    E = np.exp(-2 * wl)
    half_sinh = np.where(w > 0, -np.expm1(-2 * wl) / np.where(w > 0, 2 * w, 1.0), length)
    ye = y0 * (1 + E) / 2 + d0 * half_sinh
    de = y0 * w * w * half_sinh + d0 * (1 + E) / 2
    zeros_e = ((y0 != 0) & (np.sign(ye) != np.sign(y0))).astype(float)
    yend = np.where(osc, yo, ye)
    dend = np.where(osc, do, de)
    zeros = np.where(osc, zeros_o, zeros_e)
    growth = np.where(osc, 0.0, wl)
    new_angle = (np.pi * (np.floor(angle / np.pi) + zeros)
                 + np.mod(np.arctan2(s * yend, dend), np.pi))
    new_logamp = logamp + growth + 0.5 * np.log((s * yend) ** 2 + dend ** 2)
    return new_angle, new_logamp


def _integrate_segment(lam, s, const, smooth, a, b, y, rtol, atol):
    n = lam.size
    if n == 1:
        lam0, s0 = float(lam[0]), float(s[0])
        sin, cos = math.sin, math.cos

        def rhs(x, z):
            shift = (lam0 - const - smooth(x)) / s0
            s1, c1, s2, c2 = sin(z[0]), cos(z[0]), sin(z[2]), cos(z[2])
            return [s0 * c1 * c1 + shift * s1 * s1, (s0 - shift) * s1 * c1,
                    s0 * c2 * c2 + shift * s2 * s2, (s0 - shift) * s2 * c2]
    else:
        def rhs(x, z):
            z = z.reshape(4, n)
            shift = (lam - const - smooth(x)) / s
            s1, c1 = np.sin(z[0]), np.cos(z[0])
            s2, c2 = np.sin(z[2]), np.cos(z[2])
            return np.concatenate([s * c1 * c1 + shift * s1 * s1, (s - shift) * s1 * c1,
                                   s * c2 * c2 + shift * s2 * s2, (s - shift) * s2 * c2])

    # dop853 gives up once the angle equations turn stiff (lam << 0); LSODA
    # switches to BDF there.
    for method in ("dop853", "lsoda"):
        solver = ode(rhs).set_integrator(method, rtol=rtol, atol=atol, nsteps=10 ** 6)
        solver.set_initial_value(y, a)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            out = solver.integrate(b)
        if solver.successful():
            return np.asarray(out, dtype=float)
    raise IntegratorFailure(f"integration stopped at x = {solver.t:.6g}")


def prufer_transfer(p: EdgePotential, lams, rtol: float = RTOL,
                    atol: float = ATOL, closed_form: bool = True) -> PruferEnd:
    """Integrate both fundamental solutions across the edge for every ``lam``.

    Segments on which ``q`` is constant are crossed with the exact solution
    unless ``closed_form`` is False, in which case everything goes through
    the Runge-Kutta integrator.
    """
    lam = np.atleast_1d(np.asarray(lams, dtype=float))
    if not np.all(np.isfinite(lam)):
        raise ValueError("spectral parameters must be finite")
    n = lam.size
    s = _scale(lam)
    smooth = p.smooth_callable
    if smooth is None and not closed_form:
        smooth = lambda x: 0.0  # noqa: E731
    y = np.concatenate([np.zeros(n), np.zeros(n), np.full(n, np.pi / 2), np.log(s)])

    for a, b, const in p.segments():
        if smooth is None:
            z = y.reshape(4, n)
            y = np.concatenate([*_constant_step(lam - const, s, b - a, z[0], z[1]),
                                *_constant_step(lam - const, s, b - a, z[2], z[3])])
            continue

        y = _integrate_segment(lam, s, const, smooth, a, b, y, rtol, atol)

    z = y.reshape(4, n)
    return PruferEnd(lam, s, z[0].copy(), z[1].copy(), z[2].copy(), z[3].copy(), p.length)


@dataclass(frozen=True)
class EdgeSolution:
    """Endpoint data of the fundamental solutions, all scaled by ``e^{-scale_exponent}``."""
    lam: float
    psi_l: float
    dpsi_l: float
    phi_0: float
    dphi_0: float
    theta_l: float
    dtheta_l: float
    scale_exponent: float

    @property
    def wronskian_defect(self) -> float:
        """Relative mismatch between ``phi(0)`` and ``-psi(l)``."""
        return abs(self.phi_0 + self.psi_l) / max(abs(self.psi_l), 1e-300)


def solve_psi(p: EdgePotential, sp, rtol: float = RTOL, atol: float = ATOL):
    """``(psi(l), psi'(l), sigma)`` with the values scaled by ``e^{-sigma}``."""
    end = prufer_transfer(p, [_as_lambda(sp)], rtol, atol)
    v, d = end.psi()
    return float(v[0]), float(d[0]), float(end.sigma[0])


def solve_phi(p: EdgePotential, sp, rtol: float = RTOL, atol: float = ATOL):
    """``(phi(0), phi'(0), sigma)``; integrated as the sine solution of ``q(l - x)``."""
    end = prufer_transfer(p.reflected(), [_as_lambda(sp)], rtol, atol)
    v, d = end.psi()
    return -float(v[0]), float(d[0]), float(end.sigma[0])


def solve_edge(p: EdgePotential, sp, rtol: float = RTOL, atol: float = ATOL) -> EdgeSolution:
    lam = _as_lambda(sp)
    end = prufer_transfer(p, [lam], rtol, atol)
    pv, pd = end.psi()
    tv, td = end.theta()
    phi0, dphi0, _ = solve_phi(p, lam, rtol, atol)
    return EdgeSolution(lam, float(pv[0]), float(pd[0]), phi0, dphi0,
                        float(tv[0]), float(td[0]), float(end.sigma[0]))


def dtn_from_end(end: PruferEnd, check: bool = True) -> np.ndarray:
    """Batch of 2x2 Dirichlet-to-Neumann blocks, shape ``(len(lam), 2, 2)``.

    Maps ``(y(0), y(l))`` to ``(y'(0), -y'(l))``.  Diagonal entries are
    ratios of equally scaled values; the coupling entry ``1/psi(l)`` is
    rebuilt from the log amplitude.
    """
    pv, pd = end.psi()
    tv, _ = end.theta()
    if check:
        bad = np.abs(pv) <= POLE_TOL
        if np.any(bad):
            raise DirichletEigenvalue(
                f"lambda = {end.lam[bad][0]:.12g} is within tolerance of an edge Dirichlet eigenvalue")
    out = np.empty((end.lam.size, 2, 2))
    out[:, 0, 0] = -tv / pv
    out[:, 1, 1] = -pd / pv
    sin_psi = np.sin(end.psi_angle)
    off = end.s * np.exp(-end.psi_logamp) / sin_psi
    out[:, 0, 1] = out[:, 1, 0] = off
    return out


def ntd_from_end(end: PruferEnd, check: bool = True) -> np.ndarray:
    """Inverse blocks: ``(y'(0), -y'(l))`` to ``(y(0), y(l))``."""
    pv, pd = end.psi()
    tv, td = end.theta()
    if check:
        bad = np.abs(td) <= POLE_TOL
        if np.any(bad):
            raise NeumannEigenvalue(
                f"lambda = {end.lam[bad][0]:.12g} is within tolerance of an edge Neumann eigenvalue")
    out = np.empty((end.lam.size, 2, 2))
    out[:, 0, 0] = -pd / td
    out[:, 1, 1] = -tv / td
    off = -np.exp(-end.theta_logamp) / np.cos(end.theta_angle)
    out[:, 0, 1] = out[:, 1, 0] = off
    return out


def edge_dtn(p: EdgePotential, sp, rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """2x2 Dirichlet-to-Neumann block of one edge at one spectral point."""
    return dtn_from_end(prufer_transfer(p, [_as_lambda(sp)], rtol, atol))[0]


def edge_ntd(p: EdgePotential, sp, rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Inverse of :func:`edge_dtn` (Neumann-to-Dirichlet block)."""
    return ntd_from_end(prufer_transfer(p, [_as_lambda(sp)], rtol, atol))[0]


def transfer_many(potentials: Sequence[EdgePotential], lams, rtol: float = RTOL,
                  atol: float = ATOL) -> list[PruferEnd]:
    return [prufer_transfer(p, lams, rtol, atol) for p in potentials]
