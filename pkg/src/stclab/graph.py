"""Weighted graphs, spanning trees and congestion.

Edges carry either a single weight ``w`` (a bundle of ``w`` parallel edges)
or a double weight ``<cross|own>``: such an edge adds ``cross`` to the
congestion of every tree edge it crosses while outside the tree, and adds
``own`` to its own congestion while inside the tree.  A single weight ``w``
behaves exactly like the double weight ``<w|w>``.
"""

from __future__ import annotations

import dataclasses
from collections import deque
from functools import cached_property
from typing import Iterable, Sequence

from .errors import InvalidArgument, InvalidGraph, InvalidTree


@dataclasses.dataclass(frozen=True)
class EdgeWeight:
    cross: int
    own: int | None = None  # None = single weight

    def __post_init__(self):
        if isinstance(self.cross, bool) or not isinstance(self.cross, int) or self.cross < 1:
            raise InvalidArgument(f"edge weight must be a positive integer, got {self.cross!r}")
        if self.own is not None:
            if isinstance(self.own, bool) or not isinstance(self.own, int):
                raise InvalidArgument(f"edge weight must be a positive integer, got {self.own!r}")
            if self.own < self.cross:
                raise InvalidArgument(
                    f"double weight <{self.cross}|{self.own}> needs cross <= own"
                )

    @classmethod
    def single(cls, w: int) -> EdgeWeight:
        return cls(w)

    @classmethod
    def double(cls, cross: int, own: int) -> EdgeWeight:
        return cls(cross, own)

    @property
    def is_double(self) -> bool:
        return self.own is not None

    @property
    def in_tree(self) -> int:
        """Contribution of the edge to its own congestion when it is a tree edge."""
        return self.cross if self.own is None else self.own

    def as_list(self) -> list[int]:
        return [self.cross] if self.own is None else [self.cross, self.own]

    @classmethod
    def from_list(cls, values: Sequence[int]) -> EdgeWeight:
        if len(values) == 1:
            return cls(values[0])
        if len(values) == 2:
            return cls(values[0], values[1])
        raise InvalidArgument(f"weight must have 1 or 2 entries, got {list(values)!r}")

    def __str__(self) -> str:
        return str(self.cross) if self.own is None else f"<{self.cross}|{self.own}>"


@dataclasses.dataclass(frozen=True)
class Vertex:
    index: int
    label: str | None = None

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.index)


@dataclasses.dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    weight: EdgeWeight

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.u, self.v

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclasses.dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable undirected graph; vertex and edge ids are dense from 0."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        n = len(self.vertices)
        for i, vx in enumerate(self.vertices):
            if vx.index != i:
                raise InvalidGraph(f"vertex ids must be dense from 0; position {i} has id {vx.index}")
        seen: dict[frozenset[int], int] = {}
        for i, e in enumerate(self.edges):
            if e.id != i:
                raise InvalidGraph(f"edge ids must be dense from 0; position {i} has id {e.id}")
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise InvalidGraph(f"edge {e.id} references a missing vertex")
            if e.u == e.v:
                raise InvalidGraph(f"edge {e.id} is a self-loop on vertex {e.u}")
            key = frozenset((e.u, e.v))
            if key in seen:
                raise InvalidGraph(
                    f"edges {seen[key]} and {e.id} join the same pair; use a weight instead"
                )
            seen[key] = e.id

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex, in id order."""
        inc: list[list[int]] = [[] for _ in self.vertices]
        for e in self.edges:
            inc[e.u].append(e.id)
            inc[e.v].append(e.id)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def _pair_index(self) -> dict[frozenset[int], int]:
        return {frozenset((e.u, e.v)): e.id for e in self.edges}

    def edge_between(self, u: int, v: int) -> int | None:
        return self._pair_index.get(frozenset((u, v)))

    def vertex_by_label(self, label: str) -> int:
        for vx in self.vertices:
            if vx.label == label:
                return vx.index
        raise KeyError(label)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for eid in self.incident[x]:
                y = self.edges[eid].other(x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def has_double_weights(self) -> bool:
        return any(e.weight.is_double for e in self.edges)


class GraphBuilder:
    """Mutable helper that assigns ids in insertion order."""

    def __init__(self):
        self._vertices: list[Vertex] = []
        self._edges: list[Edge] = []

    def add_vertex(self, label: str | None = None) -> int:
        idx = len(self._vertices)
        self._vertices.append(Vertex(idx, label))
        return idx

    def add_vertices(self, count: int) -> list[int]:
        return [self.add_vertex() for _ in range(count)]

    def add_edge(self, u: int, v: int, weight: EdgeWeight | int = 1) -> int:
        if isinstance(weight, int):
            weight = EdgeWeight(weight)
        idx = len(self._edges)
        self._edges.append(Edge(idx, u, v, weight))
        return idx

    def build(self) -> WeightedGraph:
        return WeightedGraph(tuple(self._vertices), tuple(self._edges))


def graph_from_edges(
    n: int,
    edges: Iterable[tuple[int, int] | tuple[int, int, int] | tuple[int, int, int, int]],
    labels: Sequence[str] | None = None,
) -> WeightedGraph:
    """Build a graph from ``(u, v)``, ``(u, v, w)`` or ``(u, v, cross, own)`` tuples."""
    b = GraphBuilder()
    for i in range(n):
        b.add_vertex(labels[i] if labels else None)
    for item in edges:
        u, v, *w = item
        if not w:
            weight = EdgeWeight(1)
        else:
            weight = EdgeWeight.from_list(w)
        b.add_edge(u, v, weight)
    return b.build()


@dataclasses.dataclass(frozen=True)
class SpanningTree:
    graph: WeightedGraph
    edge_ids: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "edge_ids", frozenset(self.edge_ids))
        g = self.graph
        if g.n == 0:
            raise InvalidTree("graph has no vertices")
        for eid in self.edge_ids:
            if not isinstance(eid, int) or not 0 <= eid < g.m:
                raise InvalidTree(f"edge id {eid!r} is not an edge of the graph")
        if len(self.edge_ids) != g.n - 1:
            if not g.is_connected():
                raise InvalidTree("graph is disconnected; it has no spanning tree")
            raise InvalidTree(f"a spanning tree needs {g.n - 1} edges, got {len(self.edge_ids)}")
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in sorted(self.edge_ids):
            e = g.edges[eid]
            a, b = find(e.u), find(e.v)
            if a == b:
                raise InvalidTree(f"edge {eid} closes a cycle")
            parent[a] = b

    def __contains__(self, eid: int) -> bool:
        return eid in self.edge_ids

    def sorted_ids(self) -> list[int]:
        return sorted(self.edge_ids)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Tree edge ids incident to each vertex."""
        return tuple(
            tuple(eid for eid in inc if eid in self.edge_ids) for inc in self.graph.incident
        )

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def side(self, eid: int) -> frozenset[int]:
        """Vertices of the component of ``T - e`` that contains the first endpoint of ``e``."""
        if eid not in self.edge_ids:
            raise InvalidArgument(f"edge {eid} is not in the tree")
        start = self.graph.edges[eid].u
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for f in self.adjacency[x]:
                if f == eid:
                    continue
                y = self.graph.edges[f].other(x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def path(self, a: int, b: int) -> list[int]:
        """Tree edge ids on the unique ``a``-to-``b`` path, in order from ``a``."""
        prev: dict[int, tuple[int, int] | None] = {a: None}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            if x == b:
                break
            for f in self.adjacency[x]:
                y = self.graph.edges[f].other(x)
                if y not in prev:
                    prev[y] = (x, f)
                    queue.append(y)
        out: list[int] = []
        x = b
        while prev[x] is not None:
            x, f = prev[x]
            out.append(f)
        out.reverse()
        return out


@dataclasses.dataclass(frozen=True)
class CongestionReport:
    per_edge: dict[int, int]
    max_congestion: int
    witnesses: dict[int, list[int]] | None = None

    def to_json(self) -> dict:
        out = {
            "max_congestion": self.max_congestion,
            "per_edge": {str(k): v for k, v in sorted(self.per_edge.items())},
        }
        if self.witnesses is not None:
            out["witnesses"] = {str(k): v for k, v in sorted(self.witnesses.items())}
        return out


def cross_edge_set(tree: SpanningTree, eid: int) -> list[int]:
    """Edge ids of the graph with one endpoint on each side of ``T - e`` (sorted)."""
    side = tree.side(eid)
    return [e.id for e in tree.graph.edges if (e.u in side) != (e.v in side)]


def _contribution(tree: SpanningTree, eid: int, fid: int) -> int:
    w = tree.graph.edges[fid].weight
    return w.in_tree if fid == eid else w.cross


def congestion_of_edge(tree: SpanningTree, eid: int) -> int:
    return sum(_contribution(tree, eid, f) for f in cross_edge_set(tree, eid))


def tree_congestion(tree: SpanningTree, witnesses: bool = False) -> CongestionReport:
    per_edge: dict[int, int] = {}
    wit: dict[int, list[int]] | None = {} if witnesses else None
    for eid in tree.sorted_ids():
        cross = cross_edge_set(tree, eid)
        per_edge[eid] = sum(_contribution(tree, eid, f) for f in cross)
        if wit is not None:
            wit[eid] = cross
    if not per_edge:
        # Single-vertex graph: no tree edges, nothing is congested.
        return CongestionReport({}, 0, wit)
    return CongestionReport(per_edge, max(per_edge.values()), wit)


def _fresh_label(g: WeightedGraph, e: Edge, k: int | None = None) -> str:
    base = f"w@{g.vertices[e.u].name}-{g.vertices[e.v].name}"
    return base if k is None else f"{base}#{k}"


def _copy_vertices(g: WeightedGraph) -> GraphBuilder:
    b = GraphBuilder()
    for vx in g.vertices:
        b.add_vertex(vx.label)
    return b


def expand_double_weights(g: WeightedGraph) -> WeightedGraph:
    """Replace every double edge ``(u, v) <a|b>`` by a path ``u - w - v`` weighted ``a``, ``b``.

    Edges keep their relative order; the two halves of an expanded edge take
    its place in that order.  Fresh vertices are appended after the originals.
    """
    b = _copy_vertices(g)
    for e in g.edges:
        if e.weight.is_double:
            w = b.add_vertex(_fresh_label(g, e))
            b.add_edge(e.u, w, EdgeWeight(e.weight.cross))
            b.add_edge(w, e.v, EdgeWeight(e.weight.in_tree))
        else:
            b.add_edge(e.u, e.v, e.weight)
    return b.build()


def subdivide_edge(g: WeightedGraph, eid: int) -> WeightedGraph:
    if not 0 <= eid < g.m:
        raise InvalidArgument(f"no edge with id {eid}")
    target = g.edges[eid]
    if target.weight.is_double:
        raise InvalidArgument(
            f"edge {eid} has a double weight; call expand_double_weights first"
        )
    b = _copy_vertices(g)
    for e in g.edges:
        if e.id == eid:
            w = b.add_vertex(_fresh_label(g, e))
            b.add_edge(e.u, w, e.weight)
            b.add_edge(w, e.v, e.weight)
        else:
            b.add_edge(e.u, e.v, e.weight)
    return b.build()


def to_simple_graph(g: WeightedGraph) -> WeightedGraph:
    """Unweighted simple graph with the same spanning tree congestion.

    A weight-``w`` edge keeps one direct unit edge; the other ``w - 1``
    parallel copies become subdivided two-edge paths.
    """
    g = expand_double_weights(g)
    b = _copy_vertices(g)
    for e in g.edges:
        b.add_edge(e.u, e.v, 1)
        for k in range(1, e.weight.cross):
            w = b.add_vertex(_fresh_label(g, e, k))
            b.add_edge(e.u, w, 1)
            b.add_edge(w, e.v, 1)
    return b.build()
