"""Piecewise-linear finite elements on a metric graph (delta couplings only).

Discretises the form ``sum_t int (|f'|^2 + q |f|^2) + sum_v alpha_v |f(v)|^2``
with one shared degree of freedom per vertex, which enforces continuity and
makes the coupling a diagonal stiffness entry.  Meshes are aligned with the
breakpoints of piecewise potentials.  Eigenvalues from meshes ``h`` and
``h/2`` are combined by Richardson extrapolation.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import eigsh

from .errors import KindMismatch, MeshTooCoarse
from .graph import MetricGraph
from .mmatrix import DELTA, MatchingScheme, resolve_potentials
from .spectrum import Spectrum, lower_bound

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(3)


def _edge_nodes(p, h: float) -> np.ndarray:
    cuts = (0.0,) + p.breakpoints + (p.length,)
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        n = max(1, int(math.ceil((b - a) / h - 1e-12)))
        pieces.append(np.linspace(a, b, n + 1)[:-1])
    pieces.append(np.array([p.length]))
    return np.concatenate(pieces)


def assemble_fem(graph: MetricGraph, potentials, scheme: MatchingScheme, h: float):
    """Sparse stiffness ``K`` and mass ``M`` matrices for mesh width ``h``."""
    pots = resolve_potentials(graph, potentials)
    N = graph.n_vertices
    rows, cols, kv, mv = [], [], [], []
    next_id = N
    for e, p in zip(graph.edges, pots):
        x = _edge_nodes(p, h)
        ids = np.empty(len(x), dtype=int)
        ids[0], ids[-1] = e.left, e.right
        n_inner = len(x) - 2
        ids[1:-1] = np.arange(next_id, next_id + n_inner)
        next_id += n_inner
        a, b = x[:-1], x[1:]
        he = b - a
        mid, half = 0.5 * (a + b), 0.5 * he
        # potential term by 3-point Gauss on each element, evaluated left-continuous-safe
        gx = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
        qv = np.vectorize(p.eval_q)(gx)
        phi0 = 0.5 * (1 - _GAUSS_X)[None, :]
        phi1 = 0.5 * (1 + _GAUSS_X)[None, :]
        w = half[:, None] * _GAUSS_W[None, :]
        q00 = (w * qv * phi0 * phi0).sum(1)
        q01 = (w * qv * phi0 * phi1).sum(1)
        q11 = (w * qv * phi1 * phi1).sum(1)
        i, j = ids[:-1], ids[1:]
        for r, c, k, m in ((i, i, 1 / he + q00, he / 3), (i, j, -1 / he + q01, he / 6),
                           (j, i, -1 / he + q01, he / 6), (j, j, 1 / he + q11, he / 3)):
            rows.append(r)
            cols.append(c)
            kv.append(k)
            mv.append(m)
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    K = sps.coo_matrix((np.concatenate(kv), (rows, cols)), shape=(next_id, next_id)).tocsr()
    M = sps.coo_matrix((np.concatenate(mv), (rows, cols)), shape=(next_id, next_id)).tocsr()
    K = K + sps.diags(np.concatenate([scheme.alphas, np.zeros(next_id - N)]))
    return K.tocsc(), M.tocsc()


def _fem_eigs(graph, potentials, scheme, lambda_max, h, shift) -> np.ndarray:
    K, M = assemble_fem(graph, potentials, scheme, h)
    n = K.shape[0]
    est = int(graph.total_length * math.sqrt(max(lambda_max - shift, 1.0)) / math.pi) + 10
    while True:
        k = min(est, n - 2)
        vals = np.sort(eigsh(K, k=k, M=M, sigma=shift, which="LM",
                             return_eigenvectors=False))
        if vals[-1] > lambda_max * 1.05 + 1.0 or k >= n - 2:
            return vals
        est *= 2


def fem_spectrum(graph: MetricGraph, potentials, scheme: MatchingScheme, lambda_max: float,
                 mesh_h: float, extrapolate: bool = True) -> Spectrum:
    """FEM eigenvalues below ``lambda_max`` with multiplicities."""
    if scheme.kind != DELTA:
        raise KindMismatch("the finite element oracle supports delta couplings only")
    if lambda_max * mesh_h ** 2 > 0.1:
        raise MeshTooCoarse(f"lambda_max * h^2 = {lambda_max * mesh_h ** 2:.3g} exceeds 0.1")
    shift = lower_bound(graph, potentials, scheme) - 1.0
    coarse = _fem_eigs(graph, potentials, scheme, lambda_max, mesh_h, shift)
    vals = coarse
    if extrapolate:
        fine = _fem_eigs(graph, potentials, scheme, lambda_max, mesh_h / 2, shift)
        m = min(len(coarse), len(fine))
        vals = (4 * fine[:m] - coarse[:m]) / 3
    vals = vals[vals <= lambda_max]
    return Spectrum.from_values(vals, lambda_max, meta={"mesh_h": mesh_h})
