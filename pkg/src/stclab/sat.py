"""(2P1N)-SAT formulas: DIMACS reader/writer, validation and a small exact solver.

In a (2P1N) formula every variable occurs exactly three times, twice
positively and once negatively, and every clause holds two or three
literals over distinct variables.  The two positive occurrences of a
variable are told apart by reading order: the first one met in the file is
the ``FIRST`` slot, the second one the ``SECOND`` slot.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
from collections import Counter
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import InvalidArgument, ParseError, Refused

MAX_SOLVER_VARIABLES = 30


class Slot(enum.Enum):
    FIRST = "x"
    SECOND = "xp"
    NEGATIVE = "nx"


@dataclasses.dataclass(frozen=True)
class Literal:
    variable: int  # 1-based
    positive: bool
    slot: Slot

    def __post_init__(self):
        if self.positive == (self.slot is Slot.NEGATIVE):
            raise InvalidArgument(f"slot {self.slot} inconsistent with polarity of x{self.variable}")

    def as_int(self) -> int:
        return self.variable if self.positive else -self.variable

    def value(self, assignment: Mapping[int, bool]) -> bool:
        return assignment[self.variable] == self.positive

    def __str__(self) -> str:
        suffix = {Slot.FIRST: "", Slot.SECOND: "'", Slot.NEGATIVE: ""}[self.slot]
        return ("" if self.positive else "~") + f"x{self.variable}" + suffix


@dataclasses.dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def satisfied(self, assignment: Mapping[int, bool]) -> bool:
        return any(lit.value(assignment) for lit in self.literals)


@dataclasses.dataclass(frozen=True)
class Violation:
    code: str
    message: str
    variable: int | None = None
    clause: int | None = None  # 0-based clause index

    def to_json(self) -> dict:
        out: dict = {"code": self.code, "message": self.message}
        if self.variable is not None:
            out["variable"] = self.variable
        if self.clause is not None:
            out["clause"] = self.clause
        return out


class FormulaError(InvalidArgument):
    """A CNF that is not a valid (2P1N) formula."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in self.violations))


@dataclasses.dataclass(frozen=True)
class TwoPOneNFormula:
    num_variables: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        problems = validate_2p1n(self.num_variables, [[l.as_int() for l in c] for c in self.clauses])
        if problems:
            raise FormulaError(problems)
        table = _slot_table(self.clauses)
        for idx, clause in enumerate(self.clauses):
            for lit in clause:
                if lit.slot is not table[(idx, lit.variable)]:
                    raise InvalidArgument(
                        f"clause {idx + 1}: slot of x{lit.variable} does not follow reading order"
                    )

    @classmethod
    def from_clauses(cls, num_variables: int, clauses: Iterable[Sequence[int]]) -> TwoPOneNFormula:
        """Build a formula from signed integers, assigning slots in reading order."""
        raw = [list(c) for c in clauses]
        problems = validate_2p1n(num_variables, raw)
        if problems:
            raise FormulaError(problems)
        seen_positive: Counter[int] = Counter()
        built = []
        for c in raw:
            lits = []
            for x in c:
                var = abs(x)
                if x > 0:
                    slot = Slot.FIRST if seen_positive[var] == 0 else Slot.SECOND
                    seen_positive[var] += 1
                else:
                    slot = Slot.NEGATIVE
                lits.append(Literal(var, x > 0, slot))
            built.append(Clause(tuple(lits)))
        return cls(num_variables, tuple(built))

    def as_lists(self) -> list[list[int]]:
        return [[lit.as_int() for lit in c] for c in self.clauses]

    def occurrence(self, variable: int, slot: Slot) -> tuple[int, int]:
        """(clause index, position in clause) of one literal occurrence."""
        for ci, clause in enumerate(self.clauses):
            for pos, lit in enumerate(clause):
                if lit.variable == variable and lit.slot is slot:
                    return ci, pos
        raise KeyError((variable, slot))


def _slot_table(clauses: Sequence[Clause]) -> dict[tuple[int, int], Slot]:
    table = {}
    seen: Counter[int] = Counter()
    for idx, clause in enumerate(clauses):
        for lit in clause:
            if lit.positive:
                table[(idx, lit.variable)] = Slot.FIRST if seen[lit.variable] == 0 else Slot.SECOND
                seen[lit.variable] += 1
            else:
                table[(idx, lit.variable)] = Slot.NEGATIVE
    return table


def validate_2p1n(num_variables: int, clauses: Sequence[Sequence[int]]) -> list[Violation]:
    """Every way in which a raw CNF fails to be a (2P1N) formula (empty if valid)."""
    out: list[Violation] = []
    if num_variables < 1:
        out.append(Violation("empty", "formula must have at least one variable"))
    pos: Counter[int] = Counter()
    neg: Counter[int] = Counter()
    for idx, clause in enumerate(clauses):
        if len(clause) not in (2, 3):
            out.append(Violation("clause-size", f"clause {idx + 1}: size {len(clause)}, expected 2 or 3", clause=idx))
        vars_here = [abs(x) for x in clause]
        for var, count in sorted(Counter(vars_here).items()):
            if count > 1:
                out.append(Violation(
                    "duplicate-variable",
                    f"clause {idx + 1}: variable x{var} occurs {count} times",
                    variable=var, clause=idx,
                ))
        for x in clause:
            if x == 0 or abs(x) > num_variables:
                out.append(Violation(
                    "variable-range",
                    f"clause {idx + 1}: literal {x} outside 1..{num_variables}",
                    variable=abs(x), clause=idx,
                ))
            elif x > 0:
                pos[x] += 1
            else:
                neg[-x] += 1
    for var in range(1, num_variables + 1):
        if pos[var] != 2 or neg[var] != 1:
            out.append(Violation(
                "occurrences",
                f"x{var}: {pos[var]} positive, {neg[var]} negative",
                variable=var,
            ))
    return out


def parse_dimacs(text: str | bytes) -> TwoPOneNFormula:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    header: tuple[int, int] | None = None
    clauses: list[list[int]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            continue
        if stripped.startswith("%"):
            break  # SATLIB trailer
        if stripped.startswith("p"):
            parts = stripped.split()
            if header is not None:
                raise ParseError("second problem line", lineno, 1)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("problem line must be 'p cnf <vars> <clauses>'", lineno, 1)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("problem line counts must be integers", lineno, 1) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("problem line counts must be non-negative", lineno, 1)
            continue
        if header is None:
            raise ParseError("clause before problem line", lineno, 1)
        column = 1
        for token in line.split():
            column = line.index(token, column - 1) + 1
            try:
                value = int(token)
            except ValueError:
                raise ParseError(f"expected an integer, got {token!r}", lineno, column) from None
            if value == 0:
                clauses.append(current)
                current = []
            else:
                if abs(value) > header[0]:
                    raise ParseError(
                        f"literal {value} exceeds declared variable count {header[0]}", lineno, column
                    )
                current.append(value)
            column += len(token)
    if header is None:
        raise ParseError("missing problem line 'p cnf <vars> <clauses>'")
    if current:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}")
    return TwoPOneNFormula.from_clauses(header[0], clauses)


def write_dimacs(formula: TwoPOneNFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_variables} {len(formula.clauses)}")
    lines.extend(" ".join(str(x) for x in c) + " 0" for c in formula.as_lists())
    return "\n".join(lines) + "\n"


def _check_total(formula: TwoPOneNFormula, assignment: Mapping[int, bool]) -> None:
    missing = [v for v in range(1, formula.num_variables + 1) if v not in assignment]
    if missing:
        raise InvalidArgument(f"assignment is partial; missing x{missing[0]}")


def evaluate(formula: TwoPOneNFormula, assignment: Mapping[int, bool]) -> bool:
    _check_total(formula, assignment)
    return all(c.satisfied(assignment) for c in formula.clauses)


def solve_sat(formula: TwoPOneNFormula) -> dict[int, bool] | None:
    """Lexicographically smallest satisfying assignment (False < True, x1 first), or None.

    Plain backtracking in variable order; a branch is cut as soon as some
    clause has all of its variables assigned and no true literal.
    """
    n = formula.num_variables
    if n > MAX_SOLVER_VARIABLES:
        raise Refused(f"{n} variables exceeds the solver guard of {MAX_SOLVER_VARIABLES}")
    # Clauses grouped by their highest variable: they become decidable at that depth.
    closing: list[list[Clause]] = [[] for _ in range(n + 1)]
    for c in formula.clauses:
        closing[max(lit.variable for lit in c)].append(c)
    values: dict[int, bool] = {}

    def extend(var: int) -> bool:
        if var > n:
            return True
        for choice in (False, True):
            values[var] = choice
            if all(c.satisfied(values) for c in closing[var]) and extend(var + 1):
                return True
        del values[var]
        return False

    return dict(values) if extend(1) else None


def all_assignments(n: int) -> Iterator[dict[int, bool]]:
    """Every assignment of x1..xn in lexicographic order."""
    for bits in itertools.product((False, True), repeat=n):
        yield {i + 1: b for i, b in enumerate(bits)}


def satisfying_assignments(formula: TwoPOneNFormula) -> list[dict[int, bool]]:
    return [a for a in all_assignments(formula.num_variables) if evaluate(formula, a)]


def assignment_to_json(assignment: Mapping[int, bool]) -> dict[str, bool]:
    return {f"x{v}": bool(assignment[v]) for v in sorted(assignment)}


def assignment_from_json(data: Mapping[str, bool]) -> dict[int, bool]:
    out = {}
    for key, value in data.items():
        if not key.startswith("x") or not key[1:].isdigit() or not isinstance(value, bool):
            raise InvalidArgument(f"bad assignment entry {key!r}: {value!r}")
        out[int(key[1:])] = value
    return out
