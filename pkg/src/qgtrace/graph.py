"""Finite compact metric graphs with oriented edges.

Each edge is the interval ``[0, length]``; its left endpoint (x = 0) and
right endpoint (x = length) are attached to vertices identified by dense
integer ids ``0..N-1``.  The vertex partition of endpoints is stored
implicitly through these assignments.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (Disconnected, IsolatedVertex, LoopEdge, NonpositiveLength,
                     UnknownVertex)

LEFT, RIGHT = 0, 1


@dataclass(frozen=True)
class Edge:
    length: float
    left: int
    right: int

    def reversed(self) -> "Edge":
        return Edge(self.length, self.right, self.left)


class MetricGraph:
    """Validated metric graph; immutable after construction.

    >>> g = MetricGraph([(1.0, 0, 1), (1.0, 0, 2)])
    >>> g.valences.tolist()
    [2, 1, 1]
    """

    def __init__(self, edges: Iterable, vertex_count: int | None = None, *,
                 check: bool = True):
        parsed = []
        for e in edges:
            if isinstance(e, Edge):
                parsed.append(e)
            else:
                length, left, right = e
                parsed.append(Edge(float(length), int(left), int(right)))
        self._edges = tuple(parsed)
        if vertex_count is None:
            vertex_count = 1 + max((max(e.left, e.right) for e in parsed), default=-1)
        self._n_vertices = int(vertex_count)
        if check:
            validate(self)

    # basic data

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def n_vertices(self) -> int:
        return self._n_vertices

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self._edges])

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    @property
    def valences(self) -> np.ndarray:
        gamma = np.zeros(self._n_vertices, dtype=int)
        for e in self._edges:
            gamma[e.left] += 1
            gamma[e.right] += 1
        return gamma

    def endpoint_vertex(self, edge: int, end: int) -> int:
        e = self._edges[edge]
        return e.left if end == LEFT else e.right

    def endpoints(self, vertex: int) -> list[tuple[int, int]]:
        """Endpoint slots ``(edge, end)`` attached to `vertex`, in edge order."""
        self._check_vertex(vertex)
        slots = []
        for t, e in enumerate(self._edges):
            if e.left == vertex:
                slots.append((t, LEFT))
            if e.right == vertex:
                slots.append((t, RIGHT))
        return slots

    def incidence(self, vertex: int) -> tuple[frozenset, frozenset]:
        """Edges whose left (resp. right) endpoint lies in `vertex`."""
        self._check_vertex(vertex)
        left = frozenset(t for t, e in enumerate(self._edges) if e.left == vertex)
        right = frozenset(t for t, e in enumerate(self._edges) if e.right == vertex)
        return left, right

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self._n_vertices, self._n_vertices), dtype=bool)
        for e in self._edges:
            adj[e.left, e.right] = adj[e.right, e.left] = True
        np.fill_diagonal(adj, False)
        return adj

    def reversed(self, edges: Sequence[int] | None = None) -> "MetricGraph":
        """Copy with the orientation of the given edges (default: all) flipped."""
        flip = set(range(self.n_edges) if edges is None else edges)
        return MetricGraph([e.reversed() if t in flip else e
                            for t, e in enumerate(self._edges)], self._n_vertices)

    def _check_vertex(self, vertex: int) -> None:
        if not 0 <= vertex < self._n_vertices:
            raise UnknownVertex(f"vertex {vertex} not in 0..{self._n_vertices - 1}")

    def __repr__(self) -> str:
        body = ", ".join(f"({e.length:g}, {e.left}, {e.right})" for e in self._edges)
        return f"MetricGraph([{body}], vertex_count={self._n_vertices})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, MetricGraph) and self._edges == other._edges
                and self._n_vertices == other._n_vertices)

    def __hash__(self) -> int:
        return hash((self._edges, self._n_vertices))


def validate(graph: MetricGraph) -> MetricGraph:
    """Return `graph` if it is a connected, loop-free graph with positive lengths."""
    n = graph.n_vertices
    if n < 1 or graph.n_edges < 1:
        raise IsolatedVertex("graph needs at least one edge")
    for t, e in enumerate(graph.edges):
        if not (e.length > 0 and np.isfinite(e.length)):
            raise NonpositiveLength(f"edge {t} has length {e.length}")
        for v in (e.left, e.right):
            if not 0 <= v < n:
                raise UnknownVertex(f"edge {t} refers to vertex {v}")
        if e.left == e.right:
            raise LoopEdge(f"edge {t} is a loop at vertex {e.left}")
    isolated = np.flatnonzero(graph.valences == 0)
    if isolated.size:
        raise IsolatedVertex(f"vertex {int(isolated[0])} has no incident edge")

    # union-find over edges
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in graph.edges:
        parent[find(e.left)] = find(e.right)
    if len({find(v) for v in range(n)}) > 1:
        raise Disconnected("graph is not connected")
    return graph


# common shapes

def interval(length: float) -> MetricGraph:
    return MetricGraph([(length, 0, 1)])


def star(lengths: Sequence[float]) -> MetricGraph:
    """Star with centre 0; edge t runs from the centre to leaf t + 1."""
    return MetricGraph([(l, 0, t + 1) for t, l in enumerate(lengths)])


def path(lengths: Sequence[float]) -> MetricGraph:
    return MetricGraph([(l, t, t + 1) for t, l in enumerate(lengths)])


def cycle(lengths: Sequence[float]) -> MetricGraph:
    n = len(lengths)
    return MetricGraph([(l, t, (t + 1) % n) for t, l in enumerate(lengths)], n)
