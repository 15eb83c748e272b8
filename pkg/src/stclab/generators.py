"""Named graph families and seeded random instances (graphs and 2P1N formulas)."""

from __future__ import annotations

import itertools
import random

from .graph import EdgeWeight, GraphBuilder, WeightedGraph, graph_from_edges
from .sat import TwoPOneNFormula, validate_2p1n


def path_graph(n: int) -> WeightedGraph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> WeightedGraph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> WeightedGraph:
    return graph_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> WeightedGraph:
    return graph_from_edges(n, list(itertools.combinations(range(n), 2)))


def petersen_graph() -> WeightedGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return graph_from_edges(10, outer + spokes + inner)


def random_connected_graph(
    rng: random.Random,
    n: int,
    m: int,
    max_weight: int = 1,
    doubles: int = 0,
    max_double_sum: int | None = None,
) -> WeightedGraph:
    """Random connected graph with ``n`` vertices and ``m`` edges.

    A random spanning tree is laid first so the result is connected.  Up to
    ``doubles`` edges get a double weight ``<a|b>`` with ``a + b`` at most
    ``max_double_sum``; the remaining edges get single weights in
    ``1..max_weight``.
    """
    all_pairs = list(itertools.combinations(range(n), 2))
    m = max(n - 1, min(m, len(all_pairs)))
    order = list(range(n))
    rng.shuffle(order)
    chosen: set[tuple[int, int]] = set()
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        chosen.add((min(a, b), max(a, b)))
    rest = [p for p in all_pairs if p not in chosen]
    rng.shuffle(rest)
    chosen.update(rest[: m - len(chosen)])
    pairs = sorted(chosen)
    double_ids = set(rng.sample(range(len(pairs)), min(doubles, len(pairs))))
    b = GraphBuilder()
    b.add_vertices(n)
    for i, (u, v) in enumerate(pairs):
        if i in double_ids:
            cap = max_double_sum if max_double_sum is not None else 2 * max(max_weight, 2)
            cross = rng.randint(1, max(1, cap // 2))
            own = rng.randint(cross, max(cross, cap - cross))
            weight = EdgeWeight.double(cross, own)
        else:
            weight = EdgeWeight(rng.randint(1, max_weight))
        b.add_edge(u, v, weight)
    return b.build()


def random_2p1n(rng: random.Random, num_variables: int, max_tries: int = 10_000) -> TwoPOneNFormula:
    """Rejection-sample a valid (2P1N) formula over ``num_variables`` variables.

    The 3n occurrences are shuffled and cut into clauses of size 2 or 3; a
    draw is kept only if every clause has distinct variables.
    """
    if num_variables < 2:
        raise ValueError("a (2P1N) formula needs at least two variables")
    occurrences = [x for v in range(1, num_variables + 1) for x in (v, v, -v)]
    for _ in range(max_tries):
        rng.shuffle(occurrences)
        clauses: list[list[int]] = []
        pos = 0
        total = len(occurrences)
        while pos < total:
            left = total - pos
            if left in (2, 3):
                size = left
            elif left == 4:
                size = 2
            else:
                size = rng.choice((2, 3))
            clauses.append(occurrences[pos:pos + size])
            pos += size
        if not validate_2p1n(num_variables, clauses):
            return TwoPOneNFormula.from_clauses(num_variables, clauses)
    raise RuntimeError(f"no valid formula after {max_tries} draws")
