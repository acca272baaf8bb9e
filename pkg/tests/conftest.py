import numpy as np
import pytest

from qgtrace.graph import MetricGraph, star
from qgtrace.potentials import EdgePotential, Polynomial, constant, cosine, piecewise


def random_graph(rng: np.random.Generator, n_vertices: int | None = None) -> MetricGraph:
    """Connected loop-free graph: random spanning tree plus a few extra edges."""
    n = int(n_vertices or rng.integers(2, 7))
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        a, b = (u, v) if rng.random() < 0.5 else (v, u)
        edges.append((float(rng.uniform(0.5, 2.0)), a, b))
    for _ in range(int(rng.integers(0, 3))):
        a, b = rng.choice(n, size=2, replace=False)
        edges.append((float(rng.uniform(0.5, 2.0)), int(a), int(b)))
    return MetricGraph(edges, n)


def random_potential(rng: np.random.Generator, length: float) -> EdgePotential:
    kind = rng.integers(0, 4)
    if kind == 0:
        return constant(length, round(float(rng.uniform(-2, 2)), 3))
    if kind == 1:
        return cosine(length, round(float(rng.uniform(-2, 2)), 3))
    if kind == 2:
        return EdgePotential(length, (Polynomial(round(float(rng.uniform(-1, 1)), 3), 2),))
    return piecewise(length, [length / 2], [round(float(rng.uniform(-2, 2)), 3),
                                           round(float(rng.uniform(-2, 2)), 3)])


@pytest.fixture
def mixed_star():
    g = star([1.0, 1.3, 0.7])
    pots = [cosine(1), constant(1.3, 1), piecewise(0.7, [0.3], [2.0, -1.0])]
    return g, pots


def isospectral_pairs():
    """Coupling pairs related by a graph automorphism that fixes the potentials.

    Returns ``(name, graph, potentials, alphas_a, alphas_b)`` tuples.
    """
    from qgtrace.graph import MetricGraph

    out = []
    g = star([1.0, 1.0, 1.4])
    pots = [cosine(1.0, 1.5), cosine(1.0, 1.5), EdgePotential(1.4, (Polynomial(1, 2),))]
    out.append(("star-swap", g, pots, (0.3, 1.0, -0.5, 0.2), (0.3, -0.5, 1.0, 0.2)))
    g = MetricGraph([(1.2, 0, 1), (1.2, 2, 1)])
    pots = [EdgePotential(1.2, (Polynomial(1, 1),)), EdgePotential(1.2, (Polynomial(1, 1),))]
    out.append(("path-mirror", g, pots, (2.0, -0.7, 0.4), (0.4, -0.7, 2.0)))
    from qgtrace.graph import cycle
    g = cycle([1.0, 1.0, 1.0])
    pots = [cosine(1.0, 0.8, 3.0)] * 3
    out.append(("cycle-rotation", g, pots, (1.0, 0.0, -0.6), (-0.6, 1.0, 0.0)))
    g = star([0.8, 0.8, 0.8, 0.8])
    pots = [constant(0.8, 0.5)] * 2 + [cosine(0.8)] * 2
    out.append(("star4-double-swap", g, pots, (0.0, 1.0, 2.0, -1.0, 0.5),
                (0.0, 2.0, 1.0, 0.5, -1.0)))
    return out


ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
