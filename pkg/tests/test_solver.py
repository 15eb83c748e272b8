import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stclab.errors import InvalidGraph, Refused
from stclab.generators import (
    complete_graph,
    cycle_graph,
    path_graph,
    petersen_graph,
    random_connected_graph,
    star_graph,
)
from stclab.graph import SpanningTree, graph_from_edges, subdivide_edge, tree_congestion
from stclab.io import tree_from_json
from stclab.reduction import reduce
from stclab.sat import TwoPOneNFormula
from stclab.simplify import shrink
from stclab.solver import (
    SolveConfig,
    certificate_congestion,
    enumerate_spanning_trees,
    is_stc_at_most,
    iter_spanning_trees,
    stc_decide_naive,
    stc_exact,
    stc_naive,
)

from .oracles import brute_force_trees, matrix_tree_count, stc_brute


@pytest.mark.parametrize(
    "g, count",
    [
        (path_graph(6), 1),
        (star_graph(5), 1),
        (cycle_graph(5), 5),
        (complete_graph(4), 16),
        (complete_graph(5), 125),
        (petersen_graph(), 2000),
    ],
    ids=["path", "star", "C5", "K4", "K5", "petersen"],
)
def test_tree_counts_match_matrix_tree(g, count):
    assert matrix_tree_count(g) == count
    assert enumerate_spanning_trees(g) == count


def test_enumeration_yields_distinct_trees():
    g = complete_graph(5)
    trees = list(iter_spanning_trees(g))
    assert len(set(trees)) == len(trees)
    assert set(trees) == set(brute_force_trees(g))


def test_visitor_can_stop_early():
    seen = []

    def visit(tree):
        seen.append(tree)
        return len(seen) < 3

    assert enumerate_spanning_trees(complete_graph(4), visit) == 3


def test_naive_refuses_huge_enumeration():
    with pytest.raises(Refused):
        stc_naive(complete_graph(6), max_trees=100)


def test_six_cycle_decisions():
    g = cycle_graph(6)
    assert is_stc_at_most(g, 2).decision == "yes"
    assert is_stc_at_most(g, 1).decision == "no"
    assert stc_decide_naive(g, 2) and not stc_decide_naive(g, 1)


@pytest.mark.parametrize(
    "g, expected",
    [
        (path_graph(7), 1),
        (star_graph(6), 1),
        (cycle_graph(3), 2),
        (cycle_graph(8), 2),
        (complete_graph(4), 3),
        (graph_from_edges(1, []), 0),
        (graph_from_edges(2, [(0, 1, 4)]), 4),
    ],
)
def test_stc_exact_known_values(g, expected):
    r = stc_exact(g)
    assert r.decision == "yes"
    assert r.optimum == expected
    assert certificate_congestion(r) == expected


def test_petersen():
    g = petersen_graph()
    assert stc_exact(g).optimum == stc_naive(g) == stc_brute(g)


def test_disconnected_rejected():
    g = graph_from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(InvalidGraph):
        stc_exact(g)
    with pytest.raises(InvalidGraph):
        is_stc_at_most(g, 3)


def test_bad_k_rejected():
    with pytest.raises(ValueError):
        is_stc_at_most(cycle_graph(4), 0)
    with pytest.raises(ValueError):
        SolveConfig(timeout=0)


@st.composite
def small_graph(draw):
    rng = random.Random(draw(st.integers(0, 2**32 - 1)))
    n = draw(st.integers(1, 7))
    m = draw(st.integers(n - 1, min(12, n * (n - 1) // 2)))
    return random_connected_graph(rng, n, m, max_weight=draw(st.sampled_from([1, 2, 3])),
                                  doubles=draw(st.integers(0, 3)), max_double_sum=6)


@settings(max_examples=120, deadline=None)
@given(small_graph())
def test_exact_matches_naive(g):
    r = stc_exact(g)
    assert r.optimum == stc_naive(g)
    assert certificate_congestion(r) == r.optimum


@settings(max_examples=60, deadline=None)
@given(small_graph())
def test_decision_is_monotone_and_coherent(g):
    opt = stc_exact(g).optimum
    for k in range(1, opt + 3):
        r = is_stc_at_most(g, k)
        assert r.decision == ("yes" if k >= opt else "no")
        if r.decision == "yes":
            assert tree_congestion(r.certificate).max_congestion <= k
        else:
            assert r.certificate is None


def test_search_is_deterministic():
    g = random_connected_graph(random.Random(4), 9, 16, max_weight=2)
    a, b = stc_exact(g), stc_exact(g)
    assert a.certificate.edge_ids == b.certificate.edge_ids
    assert a.to_json(deterministic=True) == b.to_json(deterministic=True)


def test_decision_timeout():
    f = TwoPOneNFormula.from_clauses(4, [[2, 1], [-3, -1], [-4, 3], [1, -2], [4, 3], [2, 4]])
    g, _ = reduce(f, 5)
    r = is_stc_at_most(g, 5, SolveConfig(k=5, timeout=0.05))
    assert r.decision == "timeout"
    assert r.certificate is None


def test_optimization_timeout_keeps_best_tree():
    # Needs a few seconds to prove optimality; the first tree comes immediately.
    g = random_connected_graph(random.Random(1), 16, 40, max_weight=2)
    r = stc_exact(g, SolveConfig(timeout=0.05))
    assert r.decision == "timeout"
    assert r.certificate is not None
    assert certificate_congestion(r) == r.optimum


def test_result_json_record():
    g = cycle_graph(5)
    r = stc_exact(g)
    data = r.to_json(deterministic=True)
    assert data["decision"] == "yes" and data["optimum"] == 2
    assert data["elapsed_ms"] == 0
    tree = tree_from_json(data["certificate"], g)
    assert isinstance(tree, SpanningTree)
    assert tree.edge_ids == r.certificate.edge_ids
    no = is_stc_at_most(g, 1).to_json()
    assert "certificate" not in no and no["decision"] == "no"


class TestSimplify:
    def test_pendant_over_budget_is_no_without_search(self):
        g = graph_from_edges(3, [(0, 1, 3), (1, 2)])
        r = is_stc_at_most(g, 2)
        assert r.decision == "no" and r.trees_explored == 0

    def test_tree_collapses_to_one_vertex(self):
        r = is_stc_at_most(path_graph(9), 1)
        assert r.decision == "yes"
        assert r.certificate.edge_ids == frozenset(range(8))

    def test_parallel_pieces_merge(self):
        # u-v direct plus two u-w-v detours: one edge <3|3> once folded.
        g = graph_from_edges(4, [(0, 1), (0, 2), (2, 1), (0, 3), (3, 1)])
        shrunk = shrink(g, 3)
        assert shrunk.graph.n == 1 or shrunk.graph.m == 1
        assert is_stc_at_most(g, 3).decision == "yes"
        assert is_stc_at_most(g, 2).decision == "no"

    def test_series_keeps_the_cheaper_drop(self):
        # Path 0 - 2 - 1 of <1|2> and 3, closed by a unit edge 0-1.
        g = graph_from_edges(3, [(0, 2, 1, 2), (2, 1, 3), (0, 1)])
        assert stc_naive(g) == 4
        assert is_stc_at_most(g, 4).decision == "yes"
        assert is_stc_at_most(g, 3).decision == "no"

    @settings(max_examples=80, deadline=None)
    @given(small_graph(), st.data())
    def test_agrees_with_plain_search(self, g, data):
        for _ in range(data.draw(st.integers(0, 3))):
            singles = [e.id for e in g.edges if not e.weight.is_double]
            if singles:
                g = subdivide_edge(g, data.draw(st.sampled_from(singles)))
        for k in range(1, 9):
            a = is_stc_at_most(g, k)
            b = is_stc_at_most(g, k, SolveConfig(k=k, simplify=False))
            assert a.decision == b.decision
            if a.certificate is not None:
                assert tree_congestion(a.certificate).max_congestion <= k
