"""JSON interchange formats and DOT export."""

from __future__ import annotations

import hashlib
import json
from typing import Any

from .errors import InvalidGraph, InvalidTree
from .graph import Edge, EdgeWeight, SpanningTree, Vertex, WeightedGraph


def canonical_json(obj: Any) -> str:
    """Key-sorted, whitespace-free JSON (used for hashing)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dump_json(obj: Any) -> str:
    """Key-sorted JSON terminated by a newline; the output format of every command."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def graph_to_json(g: WeightedGraph) -> dict:
    vertices = []
    for vx in g.vertices:
        item: dict[str, Any] = {"id": vx.index}
        if vx.label is not None:
            item["label"] = vx.label
        vertices.append(item)
    edges = [{"id": e.id, "u": e.u, "v": e.v, "w": e.weight.as_list()} for e in g.edges]
    return {"vertices": vertices, "edges": edges}


def graph_from_json(data: Any) -> WeightedGraph:
    try:
        raw_vertices = data["vertices"]
        raw_edges = data["edges"]
        vertices = sorted(
            (Vertex(int(item["id"]), item.get("label")) for item in raw_vertices),
            key=lambda vx: vx.index,
        )
        edges = sorted(
            (
                Edge(int(item["id"]), int(item["u"]), int(item["v"]), EdgeWeight.from_list(item["w"]))
                for item in raw_edges
            ),
            key=lambda e: e.id,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidGraph(f"malformed graph JSON: {exc!r}") from exc
    return WeightedGraph(tuple(vertices), tuple(edges))


def graph_hash(g: WeightedGraph) -> str:
    return hashlib.sha256(canonical_json(graph_to_json(g)).encode("utf-8")).hexdigest()


def tree_to_json(tree: SpanningTree) -> dict:
    return {"graph_hash": graph_hash(tree.graph), "edges": tree.sorted_ids()}


def tree_from_json(data: Any, g: WeightedGraph) -> SpanningTree:
    try:
        digest = data["graph_hash"]
        edges = [int(x) for x in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidTree(f"malformed tree JSON: {exc!r}") from exc
    if digest != graph_hash(g):
        raise InvalidTree("tree was computed for a different graph (graph_hash mismatch)")
    if len(set(edges)) != len(edges):
        raise InvalidTree("tree lists an edge twice")
    return SpanningTree(g, frozenset(edges))


def _dot_id(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: WeightedGraph, tree: SpanningTree | None = None, name: str = "G") -> str:
    """Graphviz text; tree edges solid, non-tree edges dashed, vertices in id order."""
    lines = [f"graph {_dot_id(name)} {{"]
    for vx in g.vertices:
        lines.append(f"  {vx.index} [label={_dot_id(vx.name)}];")
    for e in g.edges:
        attrs = [f"label={_dot_id(str(e.weight))}"]
        if tree is not None:
            attrs.append("style=solid" if e.id in tree else "style=dashed")
        lines.append(f"  {e.u} -- {e.v} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
