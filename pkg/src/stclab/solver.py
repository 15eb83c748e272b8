"""Exact spanning tree congestion: pruned search, plus plain enumeration as an oracle.

The pruned search grows a single tree from a start vertex.  At each node it
picks an edge leaving the tree (see ``_Search.frontier_edge``) and branches
on including it (the outside endpoint joins as a leaf) or excluding it.
Every spanning tree is reached by exactly one include/exclude path.

Pruning uses a lower bound on the final congestion of every committed tree
edge ``e``.  Removing ``e`` splits the current tree into parts ``A`` and
``B``; in any completion ``A`` and ``B`` stay on opposite sides, and each
outside vertex ends up on one side or the other.  So the final congestion
is at least

    own(e) + w(A, B without e) + sum over outside o of min(w(o, A), w(o, B))

A branch is cut only when this bound exceeds the limit, so no feasible tree
is ever lost.  Both sums are maintained incrementally as vertices join.

The min-sum term treats outside vertices independently.  A second, sharper
bound replaces it with a minimum A/B cut through the outside vertices
(computed by augmenting paths, stopped as soon as the limit is exceeded),
where outside components that can no longer reach one side are pinned to
the other.
"""

from __future__ import annotations

import dataclasses
import sys
import time
from typing import Callable, Iterator

from .errors import InvalidGraph, Refused
from .graph import SpanningTree, WeightedGraph, tree_congestion
from .simplify import shrink

DEFAULT_TIMEOUT = 600.0
DEFAULT_MAX_TREES = 1_000_000


@dataclasses.dataclass(frozen=True)
class SolveConfig:
    k: int | None = None  # None = optimize
    timeout: float = DEFAULT_TIMEOUT  # seconds
    deterministic: bool = True
    max_trees: int | None = DEFAULT_MAX_TREES
    simplify: bool = True  # decision only: series-parallel shrinking before the search

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be a positive integer")


@dataclasses.dataclass(frozen=True)
class SolveResult:
    decision: str  # "yes" | "no" | "timeout"
    optimum: int | None = None
    certificate: SpanningTree | None = None
    trees_explored: int = 0
    elapsed: float = 0.0  # seconds

    def to_json(self, deterministic: bool = False) -> dict:
        from .io import tree_to_json

        out: dict = {
            "decision": self.decision,
            "trees_explored": self.trees_explored,
            # wall-clock time is the only nondeterministic field
            "elapsed_ms": 0 if deterministic else int(self.elapsed * 1000),
        }
        if self.optimum is not None:
            out["optimum"] = self.optimum
        if self.certificate is not None:
            out["certificate"] = tree_to_json(self.certificate)
        return out


def _require_connected(g: WeightedGraph) -> None:
    if g.n == 0 or not g.is_connected():
        raise InvalidGraph("graph must be non-empty and connected")


def iter_spanning_trees(g: WeightedGraph) -> Iterator[frozenset[int]]:
    """Yield every spanning tree (as a set of edge ids) exactly once.

    Contraction/deletion over edges in id order: an edge may be taken if it
    closes no cycle and skipped if the remaining edges still connect the
    graph, so every branch ends in a spanning tree.
    """
    _require_connected(g)
    n, m = g.n, g.m
    ends = [(e.u, e.v) for e in g.edges]
    removed = bytearray(m)
    chosen: list[int] = []

    def comp_of(x: int, edge_ids: list[int]) -> set[int]:
        adj: dict[int, list[int]] = {}
        for f in edge_ids:
            a, b = ends[f]
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        seen = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for z in adj.get(y, ()):
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return seen

    def connected_without(i: int) -> bool:
        a, b = ends[i]
        live = [f for f in range(m) if not removed[f] and f != i]
        return b in comp_of(a, live)

    def rec(i: int) -> Iterator[frozenset[int]]:
        if len(chosen) == n - 1:
            yield frozenset(chosen)
            return
        if i == m:
            return
        a, b = ends[i]
        if not removed[i] and b not in comp_of(a, chosen):
            chosen.append(i)
            yield from rec(i + 1)
            chosen.pop()
        if removed[i] or connected_without(i):
            was = removed[i]
            removed[i] = 1
            yield from rec(i + 1)
            removed[i] = was

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * m + 100))
    yield from rec(0)


def enumerate_spanning_trees(
    g: WeightedGraph, visitor: Callable[[SpanningTree], object] | None = None
) -> int:
    """Visit every spanning tree; a visitor returning ``False`` stops the walk early.

    Returns the number of trees visited.
    """
    count = 0
    for ids in iter_spanning_trees(g):
        count += 1
        if visitor is not None and visitor(SpanningTree(g, ids)) is False:
            break
    return count


def stc_naive(g: WeightedGraph, max_trees: int | None = DEFAULT_MAX_TREES) -> int:
    """Spanning tree congestion by evaluating every spanning tree (no pruning)."""
    best = None
    for count, ids in enumerate(iter_spanning_trees(g), start=1):
        if max_trees is not None and count > max_trees:
            raise Refused(f"graph has more than {max_trees} spanning trees")
        value = tree_congestion(SpanningTree(g, ids)).max_congestion
        if best is None or value < best:
            best = value
    assert best is not None
    return best


def stc_decide_naive(g: WeightedGraph, k: int, max_trees: int | None = DEFAULT_MAX_TREES) -> bool:
    """Whether some spanning tree has congestion at most ``k``, by plain enumeration."""
    for count, ids in enumerate(iter_spanning_trees(g), start=1):
        if max_trees is not None and count > max_trees:
            raise Refused(f"graph has more than {max_trees} spanning trees")
        if tree_congestion(SpanningTree(g, ids)).max_congestion <= k:
            return True
    return False


class _Timeout(Exception):
    pass


class _Search:
    """Mutable state of one pruned search; see the module docstring."""

    def __init__(self, g: WeightedGraph, limit: int, deadline: float, optimize: bool):
        self.g = g
        self.n = n = g.n
        self.limit = limit
        self.deadline = deadline
        self.optimize = optimize
        self.ends = [(e.u, e.v) for e in g.edges]
        self.cross = [e.weight.cross for e in g.edges]
        self.own = [e.weight.in_tree for e in g.edges]
        self.W = [[0] * n for _ in range(n)]
        self.nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for e in g.edges:
            self.W[e.u][e.v] = self.W[e.v][e.u] = e.weight.cross
            self.nbrs[e.u].append((e.v, e.weight.cross))
            self.nbrs[e.v].append((e.u, e.weight.cross))
        self.incident = [list(ids) for ids in g.incident]

        self.in_tree = bytearray(n)
        self.excluded = bytearray(g.m)
        self.parent = [-1] * n
        self.parent_edge = [-1] * n
        self.sub = [0] * n  # bitmask of the subtree below each tree vertex
        self.order: list[int] = []  # tree vertices in joining order
        self.w_tree = [0] * n  # w(o, tree) for every vertex
        # Per tree edge (indexed by its lower endpoint a): the running terms of the bound.
        self.cut = [0] * n
        self.minsum = [0] * n
        self.wa = [[0] * n for _ in range(n)]  # wa[a][o] = w(o, A_a)
        self.wb = [[0] * n for _ in range(n)]  # wb[a][o] = w(o, B_a)

        self.nodes = 0
        self.best_tree: frozenset[int] | None = None
        self.best_value: int | None = None
        # When set, every feasible tree is passed here instead of stopping at the first.
        self.visitor: Callable[[frozenset[int]], object] | None = None
        self.visited = 0

    def start(self, root: int) -> None:
        self.in_tree[root] = 1
        self.order.append(root)
        self.sub[root] = 1 << root
        for y, w in self.nbrs[root]:
            self.w_tree[y] += w

    def bound(self, a: int) -> int:
        return self.own[self.parent_edge[a]] + self.cut[a] + self.minsum[a]

    def attach(self, x: int, t: int, f: int) -> bool:
        """Add outside vertex ``x`` as a child of tree vertex ``t``; False if some bound breaks."""
        wa, wb, cut, minsum = self.wa, self.wb, self.cut, self.minsum
        in_tree = self.in_tree
        xbit = 1 << x
        a = t
        while a != -1:
            self.sub[a] |= xbit
            a = self.parent[a]
        x_nbrs = [(o, w) for o, w in self.nbrs[x] if not in_tree[o]]
        ok = True
        for a in self.order[1:]:
            wa_a, wb_a = wa[a], wb[a]
            old_x = wa_a[x] if wa_a[x] < wb_a[x] else wb_a[x]
            if self.sub[a] & xbit:
                cut[a] += wb_a[x]
                side = wa_a
            else:
                cut[a] += wa_a[x]
                side = wb_a
            delta = -old_x
            for o, w in x_nbrs:
                before = wa_a[o] if wa_a[o] < wb_a[o] else wb_a[o]
                side[o] += w
                after = wa_a[o] if wa_a[o] < wb_a[o] else wb_a[o]
                delta += after - before
            minsum[a] += delta
            if ok and self.own[self.parent_edge[a]] + cut[a] + minsum[a] > self.limit:
                ok = False
        # The new edge (t, x): A = {x}, B = the old tree.
        wa_x, wb_x = wa[x], wb[x]
        w_tree = self.w_tree
        cut[x] = w_tree[x] - self.cross[f]
        for o in range(self.n):
            if not in_tree[o] and o != x:
                wb_x[o] = w_tree[o]
        total = 0
        for o, w in x_nbrs:
            wa_x[o] = w
            total += w if w < w_tree[o] else w_tree[o]
        minsum[x] = total
        self.parent[x] = t
        self.parent_edge[x] = f
        self.sub[x] = xbit
        in_tree[x] = 1
        self.order.append(x)
        for o, w in self.nbrs[x]:
            self.w_tree[o] += w
        if ok and self.own[f] + cut[x] + total > self.limit:
            ok = False
        return ok

    def detach(self, x: int, t: int, f: int) -> None:
        wa, wb, cut, minsum = self.wa, self.wb, self.cut, self.minsum
        in_tree = self.in_tree
        self.order.pop()
        in_tree[x] = 0
        for o, w in self.nbrs[x]:
            self.w_tree[o] -= w
        wa[x] = [0] * self.n
        wb[x] = [0] * self.n
        cut[x] = 0
        minsum[x] = 0
        self.parent[x] = -1
        self.parent_edge[x] = -1
        xbit = 1 << x
        self.sub[x] = 0
        x_nbrs = [(o, w) for o, w in self.nbrs[x] if not in_tree[o]]
        for a in self.order[1:]:
            wa_a, wb_a = wa[a], wb[a]
            if self.sub[a] & xbit:
                side = wa_a
                cut[a] -= wb_a[x]
            else:
                side = wb_a
                cut[a] -= wa_a[x]
            delta = 0
            for o, w in x_nbrs:
                before = wa_a[o] if wa_a[o] < wb_a[o] else wb_a[o]
                side[o] -= w
                after = wa_a[o] if wa_a[o] < wb_a[o] else wb_a[o]
                delta += after - before
            delta += wa_a[x] if wa_a[x] < wb_a[x] else wb_a[x]
            minsum[a] += delta
        a = t
        while a != -1:
            self.sub[a] &= ~xbit
            a = self.parent[a]

    def flow_bound_breaks(self) -> bool:
        """Sharper check: route flow from ``A`` to ``B`` through outside vertices.

        Edges between outside vertices can be forced across the cut too, so
        ``own + cut + maxflow(A -> B through outside)`` is still a lower bound.
        Excluded edges sharpen it further: an outside component whose
        non-excluded edges only reach ``B`` must end up on the ``B`` side,
        so it is tied to the sink with unbounded capacity (likewise for ``A``).
        The flow starts from saturated two-edge paths and is augmented only
        until the limit is exceeded.
        """
        in_tree, excluded, W = self.in_tree, self.excluded, self.W
        outside = [o for o in range(self.n) if not in_tree[o]]
        if not outside:
            return False
        # Components of the outside graph over non-excluded edges, with the
        # tree vertices each component can attach to.
        comp = {}
        attach: list[int] = []
        out_nbrs: dict[int, list[int]] = {o: [] for o in outside}
        for o in outside:
            if o in comp:
                continue
            cid = len(attach)
            mask = 0
            comp[o] = cid
            stack = [o]
            while stack:
                y = stack.pop()
                for f in self.incident[y]:
                    if excluded[f]:
                        continue
                    u, v = self.ends[f]
                    z = v if u == y else u
                    if in_tree[z]:
                        mask |= 1 << z
                    else:
                        out_nbrs[y].append(z)
                        if z not in comp:
                            comp[z] = cid
                            stack.append(z)
            attach.append(mask)
        tree_mask = 0
        for t in self.order:
            tree_mask |= 1 << t
        inf = self.limit + 1
        for a in self.order[1:]:
            wa_a, wb_a = self.wa[a], self.wb[a]
            a_mask = self.sub[a]
            b_mask = tree_mask & ~a_mask
            budget = self.limit + 1 - self.own[self.parent_edge[a]] - self.cut[a]
            src: dict[int, int] = {}
            snk: dict[int, int] = {}
            base = 0
            for o in outside:
                # x: cost of o ending on B's side, y: cost of it ending on A's side.
                reach = attach[comp[o]]
                if not reach & a_mask:
                    x, y = wa_a[o], inf
                elif not reach & b_mask:
                    x, y = inf, wb_a[o]
                else:
                    x, y = wa_a[o], wb_a[o]
                low = x if x < y else y
                base += low
                if x > low:
                    src[o] = x - low
                if y > low:
                    snk[o] = y - low
            extra = budget - base
            if extra <= 0:
                return True
            if not src or not snk:
                continue
            used: dict[tuple[int, int], int] = {}
            gained = 0
            while gained < extra:
                prev: dict[int, int] = {o: -1 for o in src}
                queue = list(src)
                end = -1
                i = 0
                while i < len(queue) and end < 0:
                    o = queue[i]
                    i += 1
                    for p in out_nbrs[o]:
                        if p in prev or W[o][p] - used.get((o, p), 0) <= 0:
                            continue
                        prev[p] = o
                        if p in snk:
                            end = p
                            break
                        queue.append(p)
                if end < 0:
                    break
                path = [end]
                while prev[path[-1]] != -1:
                    path.append(prev[path[-1]])
                path.reverse()
                push = min(src[path[0]], snk[end])
                for o, p in zip(path, path[1:]):
                    push = min(push, W[o][p] - used.get((o, p), 0))
                for o, p in zip(path, path[1:]):
                    used[(o, p)] = used.get((o, p), 0) + push
                    used[(p, o)] = used.get((p, o), 0) - push
                src[path[0]] -= push
                if not src[path[0]]:
                    del src[path[0]]
                snk[end] -= push
                if not snk[end]:
                    del snk[end]
                gained += push
                if not src or not snk:
                    break
            if gained >= extra:
                return True
        return False

    def frontier_edge(self) -> tuple[int, int, int] | None:
        """Next edge to branch on: the outside vertex most tied to the tree goes first.

        Key is (-weight from x into the tree, -own weight, edge id), so the
        order is fully deterministic.
        """
        best = None
        best_key = None
        for t in self.order:
            for f in self.incident[t]:
                if self.excluded[f]:
                    continue
                u, v = self.ends[f]
                x = v if u == t else u
                if self.in_tree[x]:
                    continue
                key = (-self.w_tree[x], -self.own[f], f)
                if best_key is None or key < best_key:
                    best, best_key = (f, t, x), key
        return best

    def reaches_tree(self, x: int) -> bool:
        """Whether ``x`` still reaches the tree through non-excluded edges."""
        seen = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for f in self.incident[y]:
                if self.excluded[f]:
                    continue
                u, v = self.ends[f]
                z = v if u == y else u
                if self.in_tree[z]:
                    return True
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return False

    def current_value(self) -> int:
        return max((self.bound(a) for a in self.order[1:]), default=0)

    def dfs(self) -> bool:
        """Returns True when the search should stop (decision found)."""
        self.nodes += 1
        if not self.nodes & 1023 and time.perf_counter() > self.deadline:
            raise _Timeout
        if len(self.order) == self.n:
            value = self.current_value()
            if value <= self.limit:
                self.best_value = value
                self.best_tree = frozenset(self.parent_edge[a] for a in self.order[1:])
                if self.visitor is not None:
                    self.visited += 1
                    return self.visitor(self.best_tree) is False
                if not self.optimize:
                    return True
                self.limit = value - 1
            return False
        pick = self.frontier_edge()
        if pick is None:
            return False
        f, t, x = pick
        stop = False
        if self.attach(x, t, f) and not self.flow_bound_breaks():
            stop = self.dfs()
        self.detach(x, t, f)
        if stop:
            return True
        self.excluded[f] = 1
        if self.reaches_tree(x) and not self.flow_bound_breaks():
            stop = self.dfs()
        self.excluded[f] = 0
        return stop


def _start_vertex(g: WeightedGraph) -> int:
    # Heaviest vertex first: its edges are decided early, where cuts bite hardest.
    def weight(v: int) -> int:
        return sum(g.edges[f].weight.cross for f in g.incident[v])

    return min(range(g.n), key=lambda v: (-weight(v), v))


def _run(g: WeightedGraph, limit: int, cfg: SolveConfig, optimize: bool) -> tuple[_Search, bool]:
    started = time.perf_counter()
    search = _Search(g, limit, started + cfg.timeout, optimize)
    search.start(_start_vertex(g))
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * g.m + 100))
    try:
        search.dfs()
    except _Timeout:
        return search, True
    return search, False


def is_stc_at_most(g: WeightedGraph, k: int, cfg: SolveConfig | None = None) -> SolveResult:
    """Decide whether ``g`` has a spanning tree of congestion at most ``k``.

    Unless ``cfg.simplify`` is off, pendant vertices, parallel pieces and
    degree-two vertices are folded away first (see ``simplify``); a tree
    found on the smaller graph is lifted back and re-checked.
    """
    cfg = cfg or SolveConfig(k=k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    _require_connected(g)
    started = time.perf_counter()
    shrunk = shrink(g, k) if cfg.simplify else None
    h = shrunk.graph if shrunk is not None else g
    if shrunk is not None and shrunk.infeasible:
        return SolveResult("no", None, None, 0, time.perf_counter() - started)
    if h.n == 1:
        found, nodes, timed_out = frozenset(), 1, False
    else:
        search, timed_out = _run(h, k, cfg, optimize=False)
        found, nodes = search.best_tree, search.nodes
    elapsed = time.perf_counter() - started
    if found is None:
        return SolveResult("timeout" if timed_out else "no", None, None, nodes, elapsed)
    tree = shrunk.lift(g, found) if shrunk is not None else SpanningTree(g, found)
    if tree_congestion(tree).max_congestion > k:
        raise RuntimeError("internal error: lifted certificate exceeds k")
    return SolveResult("yes", None, tree, nodes, elapsed)


def enumerate_trees_at_most(
    g: WeightedGraph,
    k: int,
    visitor: Callable[[SpanningTree], object],
    cfg: SolveConfig | None = None,
) -> int:
    """Visit every spanning tree of congestion at most ``k``, using the pruned search.

    A visitor returning ``False`` stops the walk.  Returns the number of trees
    visited; raises ``Refused`` if the deadline passes first.
    """
    cfg = cfg or SolveConfig(k=k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    _require_connected(g)
    if g.n == 1:
        return 0 if visitor(SpanningTree(g, frozenset())) is False else 1
    search = _Search(g, k, time.perf_counter() + cfg.timeout, optimize=False)
    search.visitor = lambda ids: visitor(SpanningTree(g, ids))
    search.start(_start_vertex(g))
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * g.m + 100))
    try:
        search.dfs()
    except _Timeout:
        raise Refused(f"enumeration did not finish within {cfg.timeout} s") from None
    return search.visited


def stc_exact(g: WeightedGraph, cfg: SolveConfig | None = None) -> SolveResult:
    """Minimum congestion over all spanning trees, with a tree attaining it.

    On timeout the decision is ``"timeout"`` and ``optimum``/``certificate``
    hold the best tree found so far (an upper bound only).
    """
    cfg = cfg or SolveConfig()
    _require_connected(g)
    started = time.perf_counter()
    if g.n == 1:
        return SolveResult("yes", 0, SpanningTree(g, frozenset()), 1, 0.0)
    upper = sum(e.weight.in_tree for e in g.edges)
    search, timed_out = _run(g, upper, cfg, optimize=True)
    elapsed = time.perf_counter() - started
    cert = SpanningTree(g, search.best_tree) if search.best_tree is not None else None
    decision = "timeout" if timed_out else "yes"
    return SolveResult(decision, search.best_value, cert, search.nodes, elapsed)


def certificate_congestion(result: SolveResult) -> int | None:
    if result.certificate is None:
        return None
    return tree_congestion(result.certificate).max_congestion
