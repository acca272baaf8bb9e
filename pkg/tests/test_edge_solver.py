import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgtrace.edge_solver import (SpectralParameter, edge_dtn, edge_ntd, prufer_transfer,
                                 solve_edge, solve_phi, solve_psi)
from qgtrace.errors import DirichletEigenvalue, NeumannEigenvalue
from qgtrace.potentials import (Cosine, EdgePotential, Polynomial, constant, cosine, piecewise,
                                zero)


def test_spectral_parameter():
    sp = SpectralParameter.from_tau(3.0)
    assert sp.lam == -9.0 and sp.tau == 3.0 and sp.k == 3j
    assert sp.regime == "exponential" and sp.scale_exponent(2.0) == 6.0
    assert SpectralParameter.from_k(2.0).regime == "oscillatory"
    with pytest.raises(ValueError):
        SpectralParameter(math.inf)


def test_sine_solution_at_pi():
    v, d, s = solve_psi(zero(math.pi), SpectralParameter.from_k(1.0))
    assert abs(v) < 1e-10 and d == pytest.approx(-1.0, abs=1e-10) and s == 0.0


def test_hyperbolic_sine():
    v, d, s = solve_psi(zero(1.0), SpectralParameter.from_tau(3.0))
    assert s == 3.0
    assert v * math.exp(s) == pytest.approx(math.sinh(3) / 3, rel=1e-10)
    assert d * math.exp(s) == pytest.approx(math.cosh(3), rel=1e-10)
    v, d, s = solve_phi(zero(1.0), SpectralParameter.from_tau(3.0))
    assert v * math.exp(s) == pytest.approx(-math.sinh(3) / 3, rel=1e-10)


@pytest.mark.parametrize("c, k, l", [(1.0, 3.0, 1.0), (-2.0, 1.5, 2.0), (4.0, 2.5, 0.7)])
def test_constant_potential_closed_form(c, k, l):
    w = math.sqrt(k * k - c)
    v, d, _ = solve_psi(constant(l, c), SpectralParameter.from_k(k))
    assert v == pytest.approx(math.sin(w * l) / w, rel=1e-10)
    assert d == pytest.approx(math.cos(w * l), rel=1e-10)


@pytest.mark.parametrize("closed_form", [True, False])
def test_free_phi_closed_form(closed_form):
    k, l = 2.3, 1.7
    phi0, dphi0, _ = solve_phi(zero(l), SpectralParameter.from_k(k))
    assert phi0 == pytest.approx(-math.sin(k * l) / k, rel=1e-10)
    assert dphi0 == pytest.approx(math.cos(k * l), rel=1e-10)
    end = prufer_transfer(zero(l), [k * k], closed_form=closed_form)
    v, d = end.psi()
    assert v[0] == pytest.approx(math.sin(k * l) / k, rel=1e-9)


def test_even_potential_reflection():
    p = EdgePotential(2, (Polynomial(1, 2), Polynomial(-2, 1)))  # (x-1)^2 - 1
    for lam in (-30.0, 0.7, 12.0):
        psi_l, _, _ = solve_psi(p, lam)
        phi_0, _, _ = solve_phi(p, lam)
        assert phi_0 == pytest.approx(-psi_l, rel=1e-9)


def test_dtn_closed_form_and_symmetry():
    k, l = 1.3, 1.1
    D = edge_dtn(zero(l), SpectralParameter.from_k(k))
    want = np.array([[-k / math.tan(k * l), k / math.sin(k * l)],
                     [k / math.sin(k * l), -k / math.tan(k * l)]])
    np.testing.assert_allclose(D, want, rtol=1e-10)
    D = edge_dtn(cosine(1), SpectralParameter(-3.0))
    assert abs(D[0, 1] - D[1, 0]) <= 1e-9 * abs(D[0, 1])


def test_dtn_large_tau():
    for tau in (5.0, 20.0, 200.0):
        D = edge_dtn(zero(1.0), SpectralParameter.from_tau(tau))
        assert D[0, 0] == pytest.approx(-tau / math.tanh(tau), rel=1e-10)


def test_ntd_inverts_dtn():
    p = cosine(1.2, 0.7)
    for lam in (-50.0, -1.0, 3.3, 40.0):
        prod = edge_ntd(p, lam) @ edge_dtn(p, lam)
        np.testing.assert_allclose(prod, np.eye(2), atol=1e-9)


def test_pole_errors():
    with pytest.raises(DirichletEigenvalue):
        edge_dtn(zero(math.pi), 1.0)
    with pytest.raises(NeumannEigenvalue):
        edge_ntd(zero(math.pi), 4.0)


def test_no_overflow_up_to_tau_l_700():
    for p in (zero(1.0), cosine(1.0, 3.0), piecewise(1.0, [0.4], [5.0, -5.0])):
        sol = solve_edge(p, SpectralParameter.from_tau(700.0))
        vals = [sol.psi_l, sol.dpsi_l, sol.phi_0, sol.dphi_0, sol.theta_l, sol.dtheta_l]
        assert all(np.isfinite(vals)) and max(map(abs, vals)) <= 1e6


def test_integral_equation_truncation():
    """2 tau e^{-tau l} psi(l) - (1 + Q(l)/(2 tau)) is O(1/tau^2); report the constant."""
    p = EdgePotential(1, (Cosine(2, 3), Polynomial(1, 1)))
    consts = []
    for tau in (20.0, 40.0, 80.0, 160.0):
        v, _, _ = solve_psi(p, SpectralParameter.from_tau(tau))
        consts.append(abs(2 * tau * v - (1 + p.total / (2 * tau))) * tau ** 2)
    print("observed C:", max(consts))
    assert max(consts) < 10.0
    assert consts[-1] == pytest.approx(consts[-2], rel=0.1)


potentials = st.sampled_from([
    zero(1.0), cosine(1.0), cosine(1.5, -2.0, 3.0),
    EdgePotential(2, (Polynomial(1, 2),)), piecewise(1.2, [0.3, 0.9], [3.0, -2.0, 1.0]),
])


@settings(max_examples=60, deadline=None)
@given(p=potentials, lam=st.floats(-1e4, 1e3))
def test_wronskian_conservation(p, lam):
    sol = solve_edge(p, lam)
    if abs(sol.psi_l) > 1e-6:
        assert sol.wronskian_defect <= 1e-8
    else:
        assert abs(sol.phi_0 + sol.psi_l) <= 1e-8 * max(1.0, abs(sol.dpsi_l))
    end = prufer_transfer(p, [lam])
    # the angle-difference form is only meaningful while eps * amplification is small
    if np.finfo(float).eps * end.wronskian_amplification()[0] <= 1e-9:
        assert abs(end.wronskian()[0] - 1.0) <= 1e-8
