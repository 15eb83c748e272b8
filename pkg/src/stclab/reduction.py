"""Reduction from (2P1N)-SAT to K-STC, with certificate transfer in both directions.

For a formula over x1..xn the graph has a root ``r``, one five-vertex gadget
per variable (``x``, ``xp``, ``nx`` for the three occurrences plus helpers
``y`` and ``z``), and one vertex per clause.  With ``k_i = K - i``:

    edge      (nx,z)   (z,x)    (x,xp)   (r,xp)  (r,y)  (y,z)  (y,nx)
    weight    <1|k3>   <1|k3>   <1|k2>   k3      k4     k4     <1|k2>

Each clause is joined to the gadget vertex of each of its literals by a
``<1|k2>`` edge, and two-literal clauses also get a ``<1|k1>`` edge to ``r``.
The formula is satisfiable exactly when the graph has a spanning tree of
congestion at most K.
"""

from __future__ import annotations

import dataclasses
import random
import time
from typing import Mapping, Sequence

from .errors import InvalidArgument, PreconditionViolated, Unsupported
from .graph import EdgeWeight, GraphBuilder, SpanningTree, WeightedGraph, tree_congestion
from .sat import Slot, TwoPOneNFormula, evaluate, solve_sat

MIN_K = 5

GADGET_EDGES = ("nx_z", "z_x", "x_xp", "r_xp", "r_y", "y_z", "y_nx")


@dataclasses.dataclass(frozen=True)
class KParams:
    K: int

    def __post_init__(self):
        if self.K < MIN_K:
            raise Unsupported(f"the construction needs K >= {MIN_K}, got {self.K}")

    @property
    def k1(self) -> int:
        return self.K - 1

    @property
    def k2(self) -> int:
        return self.K - 2

    @property
    def k3(self) -> int:
        return self.K - 3

    @property
    def k4(self) -> int:
        return self.K - 4

    def gadget_weights(self) -> dict[str, EdgeWeight]:
        return {
            "nx_z": EdgeWeight.double(1, self.k3),
            "z_x": EdgeWeight.double(1, self.k3),
            "x_xp": EdgeWeight.double(1, self.k2),
            "r_xp": EdgeWeight(self.k3),
            "r_y": EdgeWeight(self.k4),
            "y_z": EdgeWeight(self.k4),
            "y_nx": EdgeWeight.double(1, self.k2),
        }


@dataclasses.dataclass(frozen=True)
class Gadget:
    x: int
    xp: int
    nx: int
    y: int
    z: int

    def literal_vertex(self, slot: Slot) -> int:
        return {Slot.FIRST: self.x, Slot.SECOND: self.xp, Slot.NEGATIVE: self.nx}[slot]

    def endpoints(self, root: int) -> dict[str, tuple[int, int]]:
        return {
            "nx_z": (self.nx, self.z),
            "z_x": (self.z, self.x),
            "x_xp": (self.x, self.xp),
            "r_xp": (root, self.xp),
            "r_y": (root, self.y),
            "y_z": (self.y, self.z),
            "y_nx": (self.y, self.nx),
        }


@dataclasses.dataclass(frozen=True)
class ClauseIds:
    vertex: int
    lit_edges: tuple[int, ...]
    root_edge: int | None = None


@dataclasses.dataclass(frozen=True)
class ReductionMap:
    root: int
    vars: tuple[Gadget, ...]  # vars[i] is the gadget of x_{i+1}
    clauses: tuple[ClauseIds, ...]
    params: KParams

    @property
    def K(self) -> int:
        return self.params.K

    def gadget_edge(self, g: WeightedGraph, var: int, name: str) -> int:
        u, v = self.vars[var - 1].endpoints(self.root)[name]
        eid = g.edge_between(u, v)
        if eid is None:
            raise InvalidArgument(f"graph lacks gadget edge {name} of x{var}")
        return eid

    def literal_of_vertex(self) -> dict[int, tuple[int, Slot]]:
        out = {}
        for i, gad in enumerate(self.vars, start=1):
            for slot in Slot:
                out[gad.literal_vertex(slot)] = (i, slot)
        return out

    def clause_literal_edges(self, g: WeightedGraph, ci: int) -> list[tuple[int, int, Slot]]:
        """(edge id, variable, slot) for each clause-to-literal edge of clause ``ci``."""
        lookup = self.literal_of_vertex()
        cv = self.clauses[ci].vertex
        out = []
        for eid in self.clauses[ci].lit_edges:
            var, slot = lookup[g.edges[eid].other(cv)]
            out.append((eid, var, slot))
        return out

    def literal_edge(self, g: WeightedGraph, var: int, slot: Slot) -> tuple[int, int]:
        """(clause index, edge id) of the clause-to-literal edge at one literal vertex."""
        target = self.vars[var - 1].literal_vertex(slot)
        for ci, c in enumerate(self.clauses):
            for eid in c.lit_edges:
                if g.edges[eid].other(c.vertex) == target:
                    return ci, eid
        raise InvalidArgument(f"literal vertex of x{var} ({slot.value}) has no clause edge")

    def to_json(self) -> dict:
        clauses = []
        for c in self.clauses:
            item: dict = {"vertex": c.vertex, "lit_edges": list(c.lit_edges)}
            if c.root_edge is not None:
                item["root_edge"] = c.root_edge
            clauses.append(item)
        return {
            "root": self.root,
            "vars": [dataclasses.asdict(gad) for gad in self.vars],
            "clauses": clauses,
            "K": self.K,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ReductionMap:
        try:
            return cls(
                root=int(data["root"]),
                vars=tuple(Gadget(**{k: int(v[k]) for k in ("x", "xp", "nx", "y", "z")}) for v in data["vars"]),
                clauses=tuple(
                    ClauseIds(int(c["vertex"]), tuple(int(e) for e in c["lit_edges"]), c.get("root_edge"))
                    for c in data["clauses"]
                ),
                params=KParams(int(data["K"])),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"malformed reduction map JSON: {exc!r}") from exc


def reduce(formula: TwoPOneNFormula, K: int) -> tuple[WeightedGraph, ReductionMap]:
    params = KParams(K)
    if not isinstance(formula, TwoPOneNFormula):
        raise InvalidArgument("reduce expects a validated TwoPOneNFormula")
    weights = params.gadget_weights()
    b = GraphBuilder()
    root = b.add_vertex("r")
    gadgets = []
    for i in range(1, formula.num_variables + 1):
        gadgets.append(Gadget(
            x=b.add_vertex(f"x{i}"),
            xp=b.add_vertex(f"x{i}p"),
            nx=b.add_vertex(f"nx{i}"),
            y=b.add_vertex(f"y{i}"),
            z=b.add_vertex(f"z{i}"),
        ))
    clause_vertices = [b.add_vertex(f"c{j}") for j in range(1, len(formula.clauses) + 1)]
    for gad in gadgets:
        ends = gad.endpoints(root)
        for name in GADGET_EDGES:
            b.add_edge(*ends[name], weights[name])
    clause_ids = []
    for cv, clause in zip(clause_vertices, formula.clauses):
        lit_edges = tuple(
            b.add_edge(cv, gadgets[lit.variable - 1].literal_vertex(lit.slot), EdgeWeight.double(1, params.k2))
            for lit in clause
        )
        root_edge = b.add_edge(root, cv, EdgeWeight.double(1, params.k1)) if len(clause) == 2 else None
        clause_ids.append(ClauseIds(cv, lit_edges, root_edge))
    return b.build(), ReductionMap(root, tuple(gadgets), tuple(clause_ids), params)


def audit_reduction(g: WeightedGraph, rmap: ReductionMap, formula: TwoPOneNFormula) -> list[str]:
    """Structural problems of a reduced graph (empty when it matches the construction)."""
    problems = []
    n, m = formula.num_variables, len(formula.clauses)
    two = sum(1 for c in formula.clauses if len(c) == 2)
    if g.n != 1 + 5 * n + m:
        problems.append(f"vertex count {g.n} != {1 + 5 * n + m}")
    if g.m != 7 * n + 3 * n + two:
        problems.append(f"edge count {g.m} != {7 * n + 3 * n + two}")
    weights = rmap.params.gadget_weights()
    for i in range(1, n + 1):
        for name in GADGET_EDGES:
            try:
                eid = rmap.gadget_edge(g, i, name)
            except InvalidArgument as exc:
                problems.append(str(exc))
                continue
            if g.edges[eid].weight != weights[name]:
                problems.append(f"x{i} {name}: weight {g.edges[eid].weight} != {weights[name]}")
    lit_w = EdgeWeight.double(1, rmap.params.k2)
    root_w = EdgeWeight.double(1, rmap.params.k1)
    for ci, (clause, ids) in enumerate(zip(formula.clauses, rmap.clauses)):
        expected_degree = len(clause) + (1 if len(clause) == 2 else 0)
        if len(g.incident[ids.vertex]) != expected_degree:
            problems.append(f"c{ci + 1}: degree {len(g.incident[ids.vertex])} != {expected_degree}")
        for lit, eid in zip(clause, ids.lit_edges):
            target = rmap.vars[lit.variable - 1].literal_vertex(lit.slot)
            e = g.edges[eid]
            if {e.u, e.v} != {ids.vertex, target} or e.weight != lit_w:
                problems.append(f"c{ci + 1}: bad clause-to-literal edge {eid} for {lit}")
        if (ids.root_edge is not None) != (len(clause) == 2):
            problems.append(f"c{ci + 1}: root edge presence does not match clause size")
        if ids.root_edge is not None and g.edges[ids.root_edge].weight != root_w:
            problems.append(f"c{ci + 1}: root edge weight {g.edges[ids.root_edge].weight}")
    for e in g.edges:
        if e.weight.is_double and e.weight.cross + e.weight.in_tree > rmap.K:
            problems.append(f"edge {e.id}: double weight {e.weight} exceeds K={rmap.K}")
    return problems


def default_choices(g: WeightedGraph, rmap: ReductionMap, assignment: Mapping[int, bool]) -> list[int]:
    """For each clause, the position of its true literal with the lowest variable index."""
    out = []
    for ci in range(len(rmap.clauses)):
        true_lits = [
            (var, list(Slot).index(slot), pos)
            for pos, (_, var, slot) in enumerate(rmap.clause_literal_edges(g, ci))
            if assignment[var] == (slot is not Slot.NEGATIVE)
        ]
        if not true_lits:
            raise InvalidArgument(f"assignment does not satisfy clause c{ci + 1}")
        out.append(min(true_lits)[2])
    return out


def random_choices(
    g: WeightedGraph, rmap: ReductionMap, assignment: Mapping[int, bool], rng: random.Random
) -> list[int]:
    out = []
    for ci in range(len(rmap.clauses)):
        true_pos = [
            pos
            for pos, (_, var, slot) in enumerate(rmap.clause_literal_edges(g, ci))
            if assignment[var] == (slot is not Slot.NEGATIVE)
        ]
        if not true_pos:
            raise InvalidArgument(f"assignment does not satisfy clause c{ci + 1}")
        out.append(rng.choice(true_pos))
    return out


def assignment_to_tree(
    g: WeightedGraph,
    rmap: ReductionMap,
    assignment: Mapping[int, bool],
    choices: Sequence[int] | None = None,
) -> SpanningTree:
    """Spanning tree of congestion at most K built from a satisfying assignment.

    ``choices[c]`` is the position (within clause ``c``) of the literal that
    clause ``c`` hangs from; it must be true under ``assignment``.
    """
    n = len(rmap.vars)
    missing = [v for v in range(1, n + 1) if v not in assignment]
    if missing:
        raise InvalidArgument(f"assignment is partial; missing x{missing[0]}")
    if choices is None:
        choices = default_choices(g, rmap, assignment)
    if len(choices) != len(rmap.clauses):
        raise InvalidArgument(f"need one choice per clause, got {len(choices)}")
    edges = set()
    for var in range(1, n + 1):
        picks = ["r_xp", "r_y", "y_z"]
        picks += ["nx_z", "x_xp"] if not assignment[var] else ["y_nx", "z_x"]
        edges.update(rmap.gadget_edge(g, var, name) for name in picks)
    for ci, pos in enumerate(choices):
        lits = rmap.clause_literal_edges(g, ci)
        if not 0 <= pos < len(lits):
            raise InvalidArgument(f"c{ci + 1}: choice {pos} out of range")
        eid, var, slot = lits[pos]
        if assignment[var] != (slot is not Slot.NEGATIVE):
            raise InvalidArgument(f"c{ci + 1}: chosen literal of x{var} is false under the assignment")
        edges.add(eid)
    return SpanningTree(g, frozenset(edges))


def tree_to_assignment(tree: SpanningTree, rmap: ReductionMap) -> dict[int, bool]:
    """x_i is false exactly when the clause edge at its negative literal vertex is a tree edge."""
    worst = tree_congestion(tree).max_congestion
    if worst > rmap.K:
        raise PreconditionViolated(f"tree congestion {worst} exceeds K={rmap.K}")
    g = tree.graph
    return {
        var: rmap.literal_edge(g, var, Slot.NEGATIVE)[1] not in tree
        for var in range(1, len(rmap.vars) + 1)
    }


@dataclasses.dataclass(frozen=True)
class ClaimResult:
    passed: bool
    witness: object = None


@dataclasses.dataclass(frozen=True)
class ClaimReport:
    claims: dict[int, ClaimResult]

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.claims.values())

    def failed(self) -> list[int]:
        return [k for k, c in sorted(self.claims.items()) if not c.passed]

    def to_json(self) -> dict:
        return {
            "claims": {
                str(k): {"pass": c.passed, "witness": c.witness}
                for k, c in sorted(self.claims.items())
            }
        }


def _first_failure(witnesses: list) -> ClaimResult:
    return ClaimResult(not witnesses, witnesses[0] if witnesses else None)


def verify_claims(tree: SpanningTree, rmap: ReductionMap) -> ClaimReport:
    """Check the eight structural properties forced on any tree of congestion <= K.

    Each claim is evaluated on its own, directly on the tree, without
    assuming the others.  A failing claim carries the first offending
    edge, vertex or path as witness.
    """
    g = tree.graph
    n = len(rmap.vars)
    root = rmap.root
    claims: dict[int, ClaimResult] = {}

    # 1: every cut on a root-to-literal path crosses two gadget edges besides (y, z).
    bad1 = []
    cross_cache: dict[int, set[int]] = {}
    for var in range(1, n + 1):
        gadget_ids = {rmap.gadget_edge(g, var, name) for name in GADGET_EDGES}
        gadget_ids.discard(rmap.gadget_edge(g, var, "y_z"))
        for slot in Slot:
            target = rmap.vars[var - 1].literal_vertex(slot)
            for eid in tree.path(root, target):
                if eid not in cross_cache:
                    side = tree.side(eid)
                    cross_cache[eid] = {f.id for f in g.edges if (f.u in side) != (f.v in side)}
                if len(cross_cache[eid] & gadget_ids) < 2:
                    bad1.append({"variable": var, "literal": slot.value, "edge": eid})
    claims[1] = _first_failure(bad1)

    claims[2] = _first_failure([
        {"clause": ci + 1, "edge": c.root_edge}
        for ci, c in enumerate(rmap.clauses)
        if c.root_edge is not None and c.root_edge in tree
    ])
    claims[3] = _first_failure([
        {"clause": ci + 1, "vertex": c.vertex, "degree": tree.degree(c.vertex)}
        for ci, c in enumerate(rmap.clauses)
        if tree.degree(c.vertex) != 1
    ])

    def missing(name: str) -> list:
        return [
            {"variable": var, "edge": rmap.gadget_edge(g, var, name)}
            for var in range(1, n + 1)
            if rmap.gadget_edge(g, var, name) not in tree
        ]

    claims[4] = _first_failure(missing("r_xp"))
    claims[5] = _first_failure(missing("r_y"))
    claims[6] = _first_failure([
        {"variable": var, "edges_in_tree": sorted(both & tree.edge_ids)}
        for var in range(1, n + 1)
        for both in [{rmap.gadget_edge(g, var, "z_x"), rmap.gadget_edge(g, var, "x_xp")}]
        if len(both & tree.edge_ids) != 1
    ])
    claims[7] = _first_failure(missing("y_z"))

    bad8 = []
    for var in range(1, n + 1):
        if rmap.literal_edge(g, var, Slot.NEGATIVE)[1] not in tree:
            continue
        for slot in (Slot.FIRST, Slot.SECOND):
            eid = rmap.literal_edge(g, var, slot)[1]
            if eid in tree:
                bad8.append({"variable": var, "edge": eid})
    claims[8] = _first_failure(bad8)
    return ClaimReport(claims)


def gadget_case(tree: SpanningTree, rmap: ReductionMap, var: int) -> str | None:
    """Which traversal pattern the tree uses on one gadget.

    Returns ``"0a"``/``"0b"`` for the false pattern (negative literal chosen
    or not) and ``"1a"``..``"1d"`` for the true pattern (both positive
    literals chosen, only the second, only the first, neither); None when the
    gadget follows neither pattern.
    """
    g = tree.graph
    has = lambda name: rmap.gadget_edge(g, var, name) in tree  # noqa: E731
    chosen = {slot: rmap.literal_edge(g, var, slot)[1] in tree for slot in Slot}
    if not (has("r_xp") and has("r_y") and has("y_z")):
        return None
    if has("nx_z") and has("x_xp") and not has("y_nx") and not has("z_x"):
        if chosen[Slot.FIRST] or chosen[Slot.SECOND]:
            return None
        return "0a" if chosen[Slot.NEGATIVE] else "0b"
    if has("y_nx") and has("z_x") and not has("nx_z") and not has("x_xp"):
        if chosen[Slot.NEGATIVE]:
            return None
        return {
            (True, True): "1a",
            (False, True): "1b",
            (True, False): "1c",
            (False, False): "1d",
        }[(chosen[Slot.FIRST], chosen[Slot.SECOND])]
    return None


@dataclasses.dataclass
class RoundtripVerdict:
    satisfiable: bool
    stc_decision: str
    verdict: str  # consistent | inconsistent | inconclusive
    assignment: dict[int, bool] | None = None
    forward_congestion: int | None = None
    certificate_congestion: int | None = None
    extracted_assignment: dict[int, bool] | None = None
    extracted_satisfies: bool | None = None
    claims_pass: bool | None = None
    trees_explored: int = 0
    elapsed_ms: int = 0
    problems: list[str] = dataclasses.field(default_factory=list)

    @property
    def label(self) -> str:
        if self.verdict == "inconclusive":
            return "inconclusive"
        return f"{self.verdict}({'sat' if self.satisfiable else 'unsat'},{self.stc_decision})"

    def to_json(self) -> dict:
        from .sat import assignment_to_json

        out = {
            "verdict": self.verdict,
            "label": self.label,
            "satisfiable": self.satisfiable,
            "stc_decision": self.stc_decision,
            "trees_explored": self.trees_explored,
            "elapsed_ms": self.elapsed_ms,
            "problems": list(self.problems),
        }
        if self.assignment is not None:
            out["assignment"] = assignment_to_json(self.assignment)
        if self.forward_congestion is not None:
            out["forward_congestion"] = self.forward_congestion
        if self.certificate_congestion is not None:
            out["certificate_congestion"] = self.certificate_congestion
        if self.extracted_assignment is not None:
            out["extracted_assignment"] = assignment_to_json(self.extracted_assignment)
            out["extracted_satisfies"] = self.extracted_satisfies
        if self.claims_pass is not None:
            out["claims_pass"] = self.claims_pass
        return out


def roundtrip_check(formula: TwoPOneNFormula, K: int, cfg=None) -> RoundtripVerdict:
    """Check ``satisfiable <=> stc(G) <= K`` on one formula, plus both certificate transfers."""
    from .solver import SolveConfig, is_stc_at_most

    cfg = cfg or SolveConfig(k=K)
    started = time.perf_counter()
    g, rmap = reduce(formula, K)
    problems = audit_reduction(g, rmap, formula)
    assignment = solve_sat(formula)
    result = is_stc_at_most(g, K, cfg)
    verdict = RoundtripVerdict(
        satisfiable=assignment is not None,
        stc_decision=result.decision,
        verdict="consistent",
        assignment=assignment,
        trees_explored=result.trees_explored,
    )
    if assignment is not None:
        forward = assignment_to_tree(g, rmap, assignment)
        verdict.forward_congestion = tree_congestion(forward).max_congestion
        if verdict.forward_congestion > K:
            problems.append(f"forward tree has congestion {verdict.forward_congestion} > K")
    if result.decision == "yes":
        cert = result.certificate
        verdict.certificate_congestion = tree_congestion(cert).max_congestion
        if verdict.certificate_congestion > K:
            problems.append(f"solver certificate has congestion {verdict.certificate_congestion} > K")
        else:
            extracted = tree_to_assignment(cert, rmap)
            verdict.extracted_assignment = extracted
            verdict.extracted_satisfies = evaluate(formula, extracted)
            if not verdict.extracted_satisfies:
                problems.append("assignment extracted from the certificate does not satisfy the formula")
            report = verify_claims(cert, rmap)
            verdict.claims_pass = report.all_pass
            if not report.all_pass:
                problems.append(f"certificate fails claims {report.failed()}")
    if result.decision == "timeout":
        verdict.verdict = "inconclusive"
    elif (result.decision == "yes") != verdict.satisfiable:
        problems.append("satisfiability and K-STC decision disagree")
    if problems:
        verdict.verdict = "inconsistent"
    verdict.problems = problems
    verdict.elapsed_ms = int((time.perf_counter() - started) * 1000)
    return verdict
