import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stclab.errors import InvalidArgument, ParseError, Refused
from stclab.generators import random_2p1n
from stclab.sat import (
    FormulaError,
    Slot,
    TwoPOneNFormula,
    all_assignments,
    assignment_from_json,
    assignment_to_json,
    evaluate,
    parse_dimacs,
    solve_sat,
    validate_2p1n,
    write_dimacs,
)

TWO_VAR = "p cnf 2 3\n1 2 0\n1 -2 0\n-1 2 0\n"
# Found by seeded random search; unsatisfiable by exhaustion over all 16 assignments.
UNSAT_4 = [[2, 1], [-3, -1], [-4, 3], [1, -2], [4, 3], [2, 4]]


def test_parse_two_variable_formula():
    f = parse_dimacs(TWO_VAR)
    assert f.num_variables == 2 and len(f.clauses) == 3
    assert f.as_lists() == [[1, 2], [1, -2], [-1, 2]]


def test_slots_follow_reading_order():
    f = parse_dimacs(TWO_VAR)
    slots = [[lit.slot for lit in c] for c in f.clauses]
    assert slots == [
        [Slot.FIRST, Slot.FIRST],
        [Slot.SECOND, Slot.NEGATIVE],
        [Slot.NEGATIVE, Slot.SECOND],
    ]


def test_parse_accepts_bytes_comments_and_wrapped_clauses():
    text = b"c hello\np cnf 2 3\n1 2 0 1\n-2 0\n-1 2 0\n"
    assert parse_dimacs(text).as_lists() == [[1, 2], [1, -2], [-1, 2]]


def test_parse_duplicate_variable():
    with pytest.raises(FormulaError) as info:
        parse_dimacs("p cnf 1 1\n1 -1 0\n")
    assert any(v.code == "duplicate-variable" and v.variable == 1 for v in info.value.violations)


def test_parse_unit_clause():
    with pytest.raises(FormulaError) as info:
        parse_dimacs("p cnf 1 2\n1 0\n-1 0\n")
    assert any(v.code == "clause-size" for v in info.value.violations)


@pytest.mark.parametrize(
    "text, where",
    [
        ("1 2 0\n", "line 1"),
        ("p cnf 2 3\n1 x 0\n", "line 2, column 3"),
        ("p cnf 2 1\n1 2 0\n1 -2 0\n", "declares 1 clauses"),
        ("p cnf 2 3\n1 2 0\n1 -2 0\n-1 2\n", "not terminated"),
        ("p cnf 2 3\n1 5 0\n", "exceeds"),
        ("p dnf 2 3\n", "problem line"),
    ],
)
def test_parse_errors(text, where):
    with pytest.raises(ParseError, match=where):
        parse_dimacs(text)


def test_empty_formula_rejected():
    with pytest.raises(FormulaError):
        parse_dimacs("p cnf 0 0\n")


def test_validate_ok():
    assert validate_2p1n(2, [[1, 2], [1, -2], [-1, 2]]) == []


def test_validate_three_positive():
    problems = validate_2p1n(2, [[1, 2], [1, -2], [1, 2]])
    assert "x1: 3 positive, 0 negative" in [v.message for v in problems]


def test_validate_four_literal_clause():
    problems = validate_2p1n(4, [[1, 2, 3, 4], [1, 2, 3, 4], [-1, -2], [-3, -4]])
    assert [v.code for v in problems] == ["clause-size", "clause-size"]


def test_evaluate():
    f = parse_dimacs(TWO_VAR)
    assert evaluate(f, {1: True, 2: True})
    assert not evaluate(f, {1: False, 2: False})
    with pytest.raises(InvalidArgument):
        evaluate(f, {1: True})


def test_solve_returns_lexicographically_smallest():
    f = parse_dimacs(TWO_VAR)
    expected = next(a for a in all_assignments(2) if evaluate(f, a))
    assert expected == {1: True, 2: True}
    assert solve_sat(f) == expected


def test_solve_unsat_instance():
    f = TwoPOneNFormula.from_clauses(4, UNSAT_4)
    assert not any(evaluate(f, a) for a in all_assignments(4))
    assert solve_sat(f) is None


def test_solver_guard():
    f = random_2p1n(random.Random(0), 31)
    with pytest.raises(Refused):
        solve_sat(f)


def test_assignment_json_round_trip():
    a = {1: True, 2: False, 10: True}
    data = assignment_to_json(a)
    assert list(data) == ["x1", "x10", "x2"] or set(data) == {"x1", "x2", "x10"}
    assert assignment_from_json(data) == a


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_solver_agrees_with_exhaustion(seed, n):
    f = random_2p1n(random.Random(seed), n)
    result = solve_sat(f)
    satisfying = [a for a in all_assignments(n) if evaluate(f, a)]
    if result is None:
        assert not satisfying
    else:
        assert evaluate(f, result)
        assert result == satisfying[0]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_dimacs_round_trip(seed, n):
    f = random_2p1n(random.Random(seed), n)
    text = write_dimacs(f, comments=[f"seed={seed}"])
    assert parse_dimacs(text) == f
    assert write_dimacs(parse_dimacs(text), comments=[f"seed={seed}"]) == text
