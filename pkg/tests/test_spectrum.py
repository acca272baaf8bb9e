import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from qgtrace.errors import InsufficientEigenvalues, KindMismatch, MeshTooCoarse
from qgtrace.fem import fem_spectrum
from qgtrace.graph import cycle, interval, path, star
from qgtrace.mmatrix import DELTA, DELTA_PRIME, MatchingScheme
from qgtrace.potentials import cosine, zero
from qgtrace.spectrum import (Spectrum, compute_spectrum, eigenvalue_count, isospectral,
                              lowest_eigenvalue, secular_function)


def uniform(kind, alpha, g):
    return MatchingScheme.uniform(kind, alpha, g.n_vertices)


def test_neumann_interval():
    g = interval(math.pi)
    spec = compute_spectrum(g, None, uniform(DELTA, 0.0, g), 99.5)
    np.testing.assert_allclose(spec.eigenvalues, np.arange(10) ** 2, atol=1e-8)
    assert spec.multiplicities == (1,) * 10
    for m in range(5):
        assert abs(secular_function(g, None, uniform(DELTA, 0.0, g), m * m)) < 1e-8


def test_robin_to_dirichlet_limit():
    g = interval(math.pi)
    prev = None
    for alpha in (10.0, 1e3, 1e6):
        ev = np.array(compute_spectrum(g, None, uniform(DELTA, alpha, g), 30).eigenvalues[:4])
        err = np.abs(ev - np.arange(1, 5) ** 2).max()
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < 1e-4


def _shooting_oracle(q, alpha, length, lam_max):
    """Robin eigenvalues y'(0) = alpha y(0), -y'(l) = alpha y(l) by shooting."""
    def miss(lam):
        sol = solve_ivp(lambda x, y: [y[1], (q(x) - lam) * y[0]], (0, length), [1.0, alpha],
                        rtol=1e-12, atol=1e-14)
        y, dy = sol.y[:, -1]
        return dy + alpha * y
    grid = np.linspace(-5, lam_max, 120)
    vals = [miss(l) for l in grid]
    return [brentq(miss, a, b, xtol=1e-13) for a, b, fa, fb in
            zip(grid, grid[1:], vals, vals[1:]) if fa * fb < 0]


@pytest.mark.parametrize("pot", [None, "cos"])
def test_robin_interval_against_shooting(pot):
    g = interval(1.0)
    p = cosine(1.0) if pot else zero(1.0)
    spec = compute_spectrum(g, [p], uniform(DELTA, 1.0, g), 150)
    want = _shooting_oracle(p.eval_q, 1.0, 1.0, 150)
    np.testing.assert_allclose(spec.eigenvalues, want, rtol=1e-9, atol=1e-9)


def test_equilateral_star_multiplicities():
    g = star([1.0, 1.0, 1.0])
    spec = compute_spectrum(g, None, uniform(DELTA, 0.0, g), 110)
    for lam, m in zip(spec.eigenvalues, spec.multiplicities):
        k = math.sqrt(max(lam, 0.0))
        if abs(k / math.pi - round(k / math.pi)) < 1e-8:
            assert m == 1
        else:
            assert abs(k / math.pi - 0.5 - round(k / math.pi - 0.5)) < 1e-8 and m == 2
    assert 2 in spec.multiplicities
    fem = fem_spectrum(g, None, uniform(DELTA, 0.0, g), 110, 0.01)
    assert fem.multiplicities == spec.multiplicities


def test_delta_prime_single_edge_closed_forms():
    l = 1.3
    g = interval(l)
    dirichlet = compute_spectrum(g, None, uniform(DELTA_PRIME, 0.0, g), 60)
    want = [(m * math.pi / l) ** 2 for m in range(1, 10) if (m * math.pi / l) ** 2 < 60]
    np.testing.assert_allclose(dirichlet.eigenvalues, want, rtol=1e-10)
    for alpha in (0.5, -0.8, 2.0):
        a = compute_spectrum(g, [cosine(l)], uniform(DELTA_PRIME, alpha, g), 80)
        b = compute_spectrum(g, [cosine(l)], uniform(DELTA, 1 / alpha, g), 80)
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, rtol=1e-9, atol=1e-9)


def test_secular_continuous_across_poles():
    g = star([1.0, 1.0])
    sch = uniform(DELTA, 0.3, g)
    pole = math.pi ** 2
    xs = pole + np.linspace(-1e-4, 1e-4, 41)
    vals = np.array([secular_function(g, None, sch, x) for x in xs])
    assert np.all(np.isfinite(vals))
    assert np.abs(np.diff(vals)).max() < 1e-3 * (np.abs(vals).max() + 1)


def test_lowest_eigenvalue_matches_spectrum(mixed_star):
    g, pots = mixed_star
    sch = MatchingScheme(DELTA, (0.5, -1.0, 0.0, 2.0))
    spec = compute_spectrum(g, pots, sch, 50)
    assert lowest_eigenvalue(g, pots, sch) == pytest.approx(spec.eigenvalues[0], abs=1e-10)


@pytest.mark.parametrize("g", [star([1.0, 1.3, 0.7]), cycle([1.0, 2.0, 1.5]),
                               path([0.5, 1.0, 1.5, 0.7])])
def test_weyl_law(g):
    lam = 1e4
    n = eigenvalue_count(g, None, uniform(DELTA, 0.0, g), [lam])[0]
    assert n / (g.total_length * math.sqrt(lam) / math.pi) == pytest.approx(1.0, rel=0.05)


def test_interlacing_in_alpha(mixed_star):
    g, pots = mixed_star
    base = (0.5, -1.0, 0.0, 2.0)
    ref = compute_spectrum(g, pots, MatchingScheme(DELTA, base), 80).with_multiplicity()
    for v in range(4):
        alphas = list(base)
        alphas[v] += 1.5
        up = compute_spectrum(g, pots, MatchingScheme(DELTA, alphas), 80).with_multiplicity()
        n = min(len(ref), len(up))
        assert np.all(up[:n] >= ref[:n] - 1e-10)
        assert np.all(up[:n - 1] <= ref[1:n] + 1e-10)


def test_isospectral_examples(mixed_star):
    g, pots = mixed_star
    sch = MatchingScheme(DELTA, (0.5, -1.0, 0.0, 2.0))
    a = compute_spectrum(g, pots, sch, 60)
    assert isospectral(a, a, 5, 1e-12) == (True, 0.0)
    flipped = compute_spectrum(g.reversed(), [p.reflected() for p in pots], sch, 60)
    ok, dev = isospectral(a, flipped, 5, 1e-9)
    assert ok, dev
    n1 = compute_spectrum(interval(math.pi), None, MatchingScheme(DELTA, (0, 0)), 30)
    r1 = compute_spectrum(interval(math.pi), None, MatchingScheme(DELTA, (1, 1)), 30)
    ok, dev = isospectral(n1, r1, 3, 1e-6)
    assert not ok and dev > 0.1
    with pytest.raises(InsufficientEigenvalues):
        isospectral(n1, r1, 50, 1e-6)


def test_spectrum_csv():
    spec = Spectrum((0.0, 1.0, 4.0), (1, 2, 1), 5.0)
    assert spec.to_csv().splitlines() == ["index,lambda,multiplicity", "0,0,1", "1,1,2", "2,4,1"]
    assert spec.total_count == 4
    assert list(spec.with_multiplicity()) == [0.0, 1.0, 1.0, 4.0]


def test_fem_neumann():
    g = interval(math.pi)
    fem = fem_spectrum(g, None, uniform(DELTA, 0.0, g), 17, math.pi / 2000)
    np.testing.assert_allclose(fem.eigenvalues[:5], [0, 1, 4, 9, 16], atol=1e-4)


def test_fem_guards():
    g = interval(1.0)
    with pytest.raises(MeshTooCoarse):
        fem_spectrum(g, None, uniform(DELTA, 0.0, g), 100, 0.1)
    with pytest.raises(KindMismatch):
        fem_spectrum(g, None, uniform(DELTA_PRIME, 0.0, g), 10, 0.01)


def test_fem_lowest_monotone_in_alpha(mixed_star):
    g, pots = mixed_star
    lows = [fem_spectrum(g, pots, uniform(DELTA, a, g), 20, 0.02).eigenvalues[0]
            for a in (0.0, 1.0, 5.0, 25.0)]
    assert np.all(np.diff(lows) > 0)
