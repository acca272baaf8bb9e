import math
from fractions import Fraction

import numpy as np
import pytest

from qgtrace.asymptotics import (all_vertex_asymptotics, phi_expansion, psi_expansion,
                                 psi_numeric_ratio, verify_expansion, vertex_asymptotics)
from qgtrace.errors import InsufficientSmoothness
from qgtrace.graph import path, star
from qgtrace.potentials import (Cosine, EdgePotential, Exponential, Polynomial, constant, cosine,
                                piecewise, zero)
from qgtrace.series import InversePowerSeries

SMOOTH_STAR = (star([1.0, 1.0, 2.0]),
               [cosine(1), constant(1, 1), EdgePotential(2, (Polynomial(1, 2),))])


def test_zero_potential_series():
    V, D = psi_expansion(zero(1.0), 3)
    assert V == InversePowerSeries.constant(1, 4) and D == InversePowerSeries.constant(1, 4)
    V, D = phi_expansion(zero(1.0), 3)
    assert V == InversePowerSeries.constant(-1, 4)


def test_constant_potential_second_coefficient():
    V, D = psi_expansion(constant(1, 1), 2)
    assert V[1] == 1
    assert V.coefficients == (1, 1, Fraction(-3, 2), Fraction(-17, 6))


def test_reflection_consistency():
    p = EdgePotential(1.5, (Polynomial(1, 1), Cosine(2, 3, 0.5)))
    V, D = phi_expansion(p, 3)
    Vr, Dr = psi_expansion(p.reflected(), 3)
    assert V.max_abs_diff(-Vr) < 1e-14 and D.max_abs_diff(Dr) < 1e-14


@pytest.mark.parametrize("p", [cosine(1), EdgePotential(1, (Exponential(1, -2), Polynomial(1, 1)))])
def test_psi_expansion_against_solver(p):
    M = 2
    V, D = psi_expansion(p, M)
    errs = []
    for tau in (20.0, 40.0, 80.0):
        v, d = psi_numeric_ratio(p, tau)
        u = 1 / (2 * tau)
        errs.append((abs(v - float(V(u))), abs(d - float(D(u)))))
    for (a0, b0), (a1, b1) in zip(errs, errs[1:]):
        assert a1 <= a0 / 2 ** (M + 1) * 1.5 and b1 <= b0 / 2 ** (M + 1) * 1.5


def test_free_vertex_expansion():
    g = star([1.0, 2.0, 0.5])
    for v in range(4):
        va = vertex_asymptotics(g, None, v, 3)
        assert va.leading == -g.valences[v] and va.constant_term == 0
        assert all(d == 0 for d in va.delta_exact)


def test_l1_potentials_order_zero():
    g = star([1.0, 1.0, 1.0])
    pots = [piecewise(1.0, [0.5], [3.0, -1.0])] * 3
    va = vertex_asymptotics(g, pots, 0, 0)
    assert va.leading == -3 and va.constant_term == 0 and va.delta_exact == ()
    with pytest.raises(InsufficientSmoothness):
        vertex_asymptotics(g, pots, 0, 2)


def test_zero_mean_leading_terms_exact():
    g, _ = SMOOTH_STAR
    pots = [cosine(1), cosine(1, 3), EdgePotential(2, (Cosine(1, "pi"),))]
    for va in all_vertex_asymptotics(g, pots, 3):
        assert va.leading == -va.gamma and type(va.leading) in (int, Fraction)
        assert va.constant_term == 0


def test_locality():
    g = path([1.0, 1.0, 1.0])
    a = [cosine(1), constant(1, 2), zero(1)]
    b = [cosine(1), constant(1, 2), constant(1, 7)]
    assert vertex_asymptotics(g, a, 1, 3).series == vertex_asymptotics(g, b, 1, 3).series
    assert vertex_asymptotics(g, a, 0, 3).series == vertex_asymptotics(g, b, 0, 3).series


def test_free_residuals_tiny():
    rep = verify_expansion(star([1.0, 1.0]), None, 0, 2, [20, 40, 80])
    assert np.all(rep.residuals <= 1e-8)


def test_residual_decay_order_two():
    g, pots = SMOOTH_STAR
    for v in range(g.n_vertices):
        r = verify_expansion(g, pots, v, 2, [40, 80]).residuals
        assert r[1] / r[0] <= 0.6


@pytest.mark.parametrize("M", [1, 2, 3])
def test_residuals_decrease(M):
    g, pots = SMOOTH_STAR
    for v in range(g.n_vertices):
        r = verify_expansion(g, pots, v, M, [20, 40, 80]).residuals
        assert np.all(np.diff(r) < 0)


def test_piecewise_leading_order():
    g = star([1.0, 1.0, 1.0])
    pots = [piecewise(1.0, [0.5], [3.0, -1.0])] * 3
    rep = verify_expansion(g, pots, 0, 0, [10, 40, 160])
    assert np.all(np.diff(rep.residuals) < 0)


def test_verify_grid_checks():
    with pytest.raises(ValueError):
        verify_expansion(star([1.0]), None, 0, 1, [5, 20])
    with pytest.raises(ValueError):
        verify_expansion(star([1.0]), None, 0, 1, [40, 20])
