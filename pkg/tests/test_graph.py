import numpy as np
import pytest

from qgtrace.errors import Disconnected, IsolatedVertex, LoopEdge, NonpositiveLength, UnknownVertex
from qgtrace.graph import MetricGraph, cycle, interval, path, star, validate

from conftest import random_graph


def test_star_valences():
    g = star([1.0, 1.0, 1.0])
    assert g.valences.tolist() == [3, 1, 1, 1]
    assert g.n_edges == 3 and g.n_vertices == 4


def test_interval_valences():
    assert interval(np.pi).valences.tolist() == [1, 1]


@pytest.mark.parametrize("edges, n, err", [
    ([(1.0, 0, 0)], None, LoopEdge),
    ([(1.0, 0, 1), (1.0, 2, 3)], None, Disconnected),
    ([(0.0, 0, 1)], None, NonpositiveLength),
    ([(-1.0, 0, 1)], None, NonpositiveLength),
    ([(1.0, 0, 1)], 3, IsolatedVertex),
])
def test_validation_errors(edges, n, err):
    with pytest.raises(err):
        MetricGraph(edges, n)


def test_loop_message_names_edge():
    with pytest.raises(LoopEdge, match="edge 1"):
        MetricGraph([(1.0, 0, 1), (2.0, 1, 1)])


def test_validate_returns_graph():
    g = star([1.0, 2.0])
    assert validate(g) is g


def test_incidence_examples():
    g = star([1.0, 1.0, 1.0])
    assert g.incidence(0) == (frozenset({0, 1, 2}), frozenset())
    assert g.incidence(1) == (frozenset(), frozenset({0}))
    p = path([1.0, 1.0])
    assert p.incidence(1) == (frozenset({1}), frozenset({0}))
    with pytest.raises(UnknownVertex):
        g.incidence(7)


def test_adjacency_examples():
    s = star([1.0, 1.0, 1.0]).adjacency()
    assert s[0, 1:].all() and not s[1:, 1:].any()
    assert interval(1.0).adjacency().tolist() == [[False, True], [True, False]]
    tri = cycle([1.0, 1.0, 1.0]).adjacency()
    assert (tri == ~np.eye(3, dtype=bool)).all()


def test_multi_edges_allowed():
    g = MetricGraph([(1.0, 0, 1), (2.0, 0, 1)])
    assert g.valences.tolist() == [2, 2]


@pytest.mark.parametrize("seed", range(30))
def test_graph_invariants(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng)
    assert g.valences.sum() == 2 * g.n_edges
    slots = sum(len(a) + len(b) for a, b in (g.incidence(v) for v in range(g.n_vertices)))
    assert slots == 2 * g.n_edges
    flip = [int(t) for t in np.flatnonzero(rng.random(g.n_edges) < 0.5)]
    r = g.reversed(flip)
    assert (r.adjacency() == g.adjacency()).all()
    assert (g.adjacency() == g.adjacency().T).all() and not g.adjacency().diagonal().any()
