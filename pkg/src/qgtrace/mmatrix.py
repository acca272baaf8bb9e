"""Weyl-Titchmarsh M-matrices of delta and delta-prime vertex couplings.

delta triple:        Gamma0 f = vertex values,        Gamma1 f = sums of normal derivatives
delta-prime triple:  Gamma0 f = common normal derivative, Gamma1 f = -(sums of values)

In both cases a self-adjoint coupling reads ``Gamma1 f = B Gamma0 f`` with
``B = coupling_matrix(scheme)`` for delta; for delta-prime the vertex rule
``sum f = alpha * d_n f`` becomes ``Gamma1 f = -diag(alpha) Gamma0 f``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .edge_solver import (ATOL, RTOL, SpectralParameter, dtn_from_end, ntd_from_end,
                          prufer_transfer)
from .graph import MetricGraph
from .potentials import EdgePotential, zero

DELTA = "delta"
DELTA_PRIME = "delta_prime"
_KIND_ALIASES = {"delta": DELTA, "δ": DELTA, "delta_prime": DELTA_PRIME,
                 "delta-prime": DELTA_PRIME, "δ′": DELTA_PRIME, "δ'": DELTA_PRIME}


@dataclass(frozen=True)
class MatchingScheme:
    kind: str
    alphas: tuple

    def __post_init__(self):
        try:
            kind = _KIND_ALIASES[str(self.kind).lower() if str(self.kind).isascii() else self.kind]
        except KeyError:
            raise ValueError(f"unknown matching kind {self.kind!r}") from None
        alphas = tuple(float(a) for a in np.atleast_1d(self.alphas))
        if not all(np.isfinite(alphas)):
            raise ValueError("coupling constants must be finite reals")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def uniform(cls, kind: str, alpha: float, n_vertices: int) -> "MatchingScheme":
        return cls(kind, (float(alpha),) * n_vertices)

    @property
    def n_vertices(self) -> int:
        return len(self.alphas)

    def boundary_operator(self) -> np.ndarray:
        """Matrix ``Theta`` with the coupling written as ``Gamma1 f = Theta Gamma0 f``."""
        B = coupling_matrix(self)
        return B if self.kind == DELTA else -B


def coupling_matrix(scheme: MatchingScheme) -> np.ndarray:
    return np.diag(np.asarray(scheme.alphas, dtype=float))


@dataclass(frozen=True)
class MMatrixSample:
    lam: float
    entries: np.ndarray
    regime: str
    kind: str = DELTA
    scale_exponents: tuple = field(default=())

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def resolve_potentials(graph: MetricGraph,
                       potentials: Sequence[EdgePotential | None] | None) -> list[EdgePotential]:
    """One potential per edge; ``None`` entries become zero potentials."""
    if potentials is None:
        potentials = [None] * graph.n_edges
    potentials = list(potentials)
    if len(potentials) != graph.n_edges:
        raise ValueError(f"need {graph.n_edges} edge potentials, got {len(potentials)}")
    out = []
    for t, (e, p) in enumerate(zip(graph.edges, potentials)):
        if p is None:
            p = zero(e.length)
        if abs(p.length - e.length) > 1e-12 * max(1.0, e.length):
            raise ValueError(f"potential on edge {t} has length {p.length}, edge has {e.length}")
        out.append(p)
    return out


def _lam(sp) -> float:
    return sp.lam if isinstance(sp, SpectralParameter) else float(sp)


def edge_blocks(graph: MetricGraph, potentials, lams, kind: str = DELTA,
                rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Per-edge 2x2 blocks, shape ``(n_edges, n_lams, 2, 2)``."""
    pots = resolve_potentials(graph, potentials)
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    blocks = []
    for p in pots:
        end = prufer_transfer(p, lams, rtol, atol)
        blocks.append(dtn_from_end(end) if kind == DELTA else -ntd_from_end(end))
    return np.stack(blocks)


def assemble_from_blocks(graph: MetricGraph, blocks: np.ndarray) -> np.ndarray:
    """Scatter edge blocks into vertex matrices, shape ``(n_lams, N, N)``."""
    N = graph.n_vertices
    M = np.zeros((blocks.shape[1], N, N))
    for t, e in enumerate(graph.edges):
        a, b = e.left, e.right
        M[:, a, a] += blocks[t, :, 0, 0]
        M[:, b, b] += blocks[t, :, 1, 1]
        M[:, a, b] += blocks[t, :, 0, 1]
        M[:, b, a] += blocks[t, :, 1, 0]
    return M


def mmatrix_batch(graph: MetricGraph, potentials, lams, kind: str = DELTA,
                  rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    kind = MatchingScheme(kind, ()).kind
    return assemble_from_blocks(graph, edge_blocks(graph, potentials, lams, kind, rtol, atol))


def _sample(graph, potentials, sp, kind, rtol, atol) -> MMatrixSample:
    lam = _lam(sp)
    M = mmatrix_batch(graph, potentials, [lam], kind, rtol, atol)[0]
    tau = np.sqrt(-lam) if lam < 0 else 0.0
    scales = tuple(float(tau * e.length) for e in graph.edges)
    return MMatrixSample(lam, M, "exponential" if lam < 0 else "oscillatory", kind, scales)


def assemble_delta(graph: MetricGraph, potentials, sp, rtol: float = RTOL,
                   atol: float = ATOL) -> MMatrixSample:
    """M-matrix of the delta triple at one real spectral point."""
    return _sample(graph, potentials, sp, DELTA, rtol, atol)


def assemble_delta_prime(graph: MetricGraph, potentials, sp, rtol: float = RTOL,
                         atol: float = ATOL) -> MMatrixSample:
    """M-matrix of the delta-prime triple at one real spectral point."""
    return _sample(graph, potentials, sp, DELTA_PRIME, rtol, atol)


def assemble(graph: MetricGraph, potentials, scheme_or_kind, sp, rtol: float = RTOL,
             atol: float = ATOL) -> MMatrixSample:
    kind = scheme_or_kind.kind if isinstance(scheme_or_kind, MatchingScheme) \
        else MatchingScheme(scheme_or_kind, ()).kind
    return _sample(graph, potentials, sp, kind, rtol, atol)
