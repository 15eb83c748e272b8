"""Series-parallel shrinking of a graph for one K-STC question, with certificate lifting.

Three local rewrites preserve the answer to "is there a spanning tree of
congestion at most k":

* pendant vertex w with edge <c|o>: the edge is in every spanning tree and
  its cut holds nothing else, so it costs exactly o.  Drop w (answer is no
  outright when o > k).
* parallel pieces between u and v: a tree uses at most one of them and all
  cross the same cuts, so they act as one edge with cross = sum of crosses
  and own = sum of crosses + min(own_i - cross_i).
* vertex w of degree two on u - w - v with <a|a'> and <b|b'>: if the tree
  keeps both, they act as one tree edge of own weight max(a', b').  If it
  drops one, w is a leaf whose edge carries (own of kept) + (cross of
  dropped), and the dropped edge crosses exactly the cuts of the u-v tree
  path.  Dropping the edge with the smaller cross among those whose leaf fits
  within k is never worse, so the path acts as <that cross | max(a', b')>.

A piece remembers how it was built so a tree of the shrunken graph can be
turned back into a tree of the original one.
"""

from __future__ import annotations

import dataclasses

from .graph import EdgeWeight, GraphBuilder, SpanningTree, WeightedGraph


@dataclasses.dataclass(frozen=True)
class Piece:
    kind: str  # "edge" | "parallel" | "series"
    cross: int
    own: int
    eid: int = -1  # original edge id, for kind == "edge"
    parts: tuple[Piece, ...] = ()
    dropped: int = 0  # series: index in parts of the edge left out when the piece is not a tree edge

    def lift(self, in_tree: bool, out: set[int]) -> None:
        """Add to ``out`` the original edges that realise this piece."""
        if self.kind == "edge":
            if in_tree:
                out.add(self.eid)
        elif self.kind == "parallel":
            keep = _cheapest_part(self.parts) if in_tree else -1
            for i, part in enumerate(self.parts):
                part.lift(i == keep, out)
        else:
            for i, part in enumerate(self.parts):
                part.lift(in_tree or i != self.dropped, out)


def _cheapest_part(parts: tuple[Piece, ...]) -> int:
    return min(range(len(parts)), key=lambda i: (parts[i].own - parts[i].cross, i))


def _parallel(p: Piece, q: Piece) -> Piece:
    parts = (p.parts if p.kind == "parallel" else (p,)) + (q.parts if q.kind == "parallel" else (q,))
    cross = sum(x.cross for x in parts)
    own = cross + min(x.own - x.cross for x in parts)
    return Piece("parallel", cross, own, parts=parts)


def _series(p: Piece, q: Piece, k: int) -> Piece | None:
    options = []
    if p.cross + q.own <= k:
        options.append((p.cross, 0))
    if q.cross + p.own <= k:
        options.append((q.cross, 1))
    if not options:
        return None  # both edges are forced into the tree; leave the vertex alone
    cross, dropped = min(options)
    return Piece("series", cross, max(p.own, q.own), parts=(p, q), dropped=dropped)


@dataclasses.dataclass
class Shrunk:
    graph: WeightedGraph  # the reduced instance (empty edge set when it collapsed to one vertex)
    pieces: list[Piece]  # pieces[i] realises edge i of ``graph``
    forced: list[Piece]  # pendant pieces, always tree edges
    infeasible: bool  # a forced edge already exceeds k

    def lift(self, original: WeightedGraph, edge_ids: frozenset[int]) -> SpanningTree:
        out: set[int] = set()
        for piece in self.forced:
            piece.lift(True, out)
        for i, piece in enumerate(self.pieces):
            piece.lift(i in edge_ids, out)
        return SpanningTree(original, frozenset(out))


def shrink(g: WeightedGraph, k: int) -> Shrunk:
    adj: dict[int, dict[int, Piece]] = {v: {} for v in range(g.n)}
    for e in g.edges:
        piece = Piece("edge", e.weight.cross, e.weight.in_tree, eid=e.id)
        adj[e.u][e.v] = adj[e.v][e.u] = piece
    forced: list[Piece] = []
    infeasible = False
    changed = True
    while changed and len(adj) > 1:
        changed = False
        for w in sorted(adj):
            if w not in adj or len(adj) == 1:
                continue
            nbrs = adj[w]
            if len(nbrs) == 1:
                (u, piece), = nbrs.items()
                forced.append(piece)
                infeasible |= piece.own > k
                del adj[u][w]
                del adj[w]
                changed = True
            elif len(nbrs) == 2:
                (u, p), (v, q) = sorted(nbrs.items())
                merged = _series(p, q, k)
                if merged is None:
                    continue
                del adj[u][w], adj[v][w], adj[w]
                if v in adj[u]:
                    merged = _parallel(adj[u][v], merged)
                adj[u][v] = adj[v][u] = merged
                changed = True
    keep = sorted(adj)
    index = {v: i for i, v in enumerate(keep)}
    b = GraphBuilder()
    for v in keep:
        b.add_vertex(g.vertices[v].label)
    pieces = []
    for u in keep:
        for v in sorted(adj[u]):
            if u < v:
                piece = adj[u][v]
                own = None if piece.own == piece.cross else piece.own
                b.add_edge(index[u], index[v], EdgeWeight(piece.cross, own))
                pieces.append(piece)
    return Shrunk(b.build(), pieces, forced, infeasible)
