from pathlib import Path

import pytest
from hypothesis import given, settings

from formula_gen import closed_formulas, open_formulas
from qbsf.core import TRUE, And, App, Const, Exists, Forall, Not, Or, iff, prop
from qbsf.errors import HeaderMismatch, InconsistentArity, ParseError, UndeclaredVariable
from qbsf.textio import DqbfInstance, parse_dqdimacs, parse_formula, print_dqdimacs, print_formula

DATA = Path(__file__).parent / "data"


def test_parse_example_ast():
    phi = parse_formula("exists f/2 forall x forall y (x & y <-> f(x,y))")
    x, y = prop("x"), prop("y")
    want = Exists("f", 2, Forall("x", 0, Forall("y", 0, iff(And(x, y), App("f", (x, y))))))
    assert phi == want


def test_parse_constants_and_atoms():
    assert parse_formula("1") == Const(1)
    assert parse_formula("0") == Const(0)
    assert parse_formula("f(g(x), 0)") == App("f", (App("g", (prop("x"),)), Const(0)))


def test_arity_inferred_from_first_use():
    phi = parse_formula("exists f f(x, y)")
    assert phi.arity == 2


def test_precedence():
    x, y, z = prop("x"), prop("y"), prop("z")
    assert parse_formula("x | y & z") == Or(x, And(y, z))
    assert parse_formula("~x & y") == And(Not(x), y)
    assert parse_formula("x -> y -> z") == parse_formula("x -> (y -> z)")
    # a quantifier body extends as far right as possible
    assert parse_formula("exists x x & y") == Exists("x", 0, And(x, y))


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("f(x", 1, 4),
        ("x &", 1, 4),
        ("exists (", 1, 8),
        ("x\n  & $", 2, 5),
        ("2", 1, 1),
        ("x y", 1, 3),
    ],
)
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_inconsistent_arity_in_text():
    with pytest.raises(InconsistentArity):
        parse_formula("f(x) & f(x, y)")
    with pytest.raises(InconsistentArity):
        parse_formula("exists f/2 f(x)")


def test_print_minimal_parentheses():
    assert print_formula(Const(1)) == "1"
    assert print_formula(parse_formula("f(g(x), 0)")) == "f(g(x), 0)"
    assert print_formula(parse_formula("(x | y) & z")) == "(x | y) & z"
    assert print_formula(parse_formula("x | y & z")) == "x | y & z"
    assert print_formula(parse_formula("(exists x x) & y")) == "(exists x x) & y"
    assert print_formula(parse_formula("x & (y & z)")) == "x & (y & z)"
    assert print_formula(parse_formula("~~x")) == "~~x"


def test_print_round_trips_example():
    phi = parse_formula("exists f/2 forall x forall y (x & y <-> f(x,y))")
    assert parse_formula(print_formula(phi)) == phi


def test_long_prefix_parses_without_recursion_error():
    text = " ".join(f"exists v{i}" for i in range(2000)) + " v0"
    phi = parse_formula(text)
    assert parse_formula(print_formula(phi)) == phi


@settings(max_examples=150, deadline=None)
@given(closed_formulas())
def test_round_trip_closed(phi):
    assert parse_formula(print_formula(phi)) == phi


@settings(max_examples=150, deadline=None)
@given(open_formulas())
def test_round_trip_open(phi):
    text = print_formula(phi)
    assert parse_formula(text) == phi
    assert print_formula(parse_formula(text)) == text


# --- DQDIMACS ---------------------------------------------------------------


def test_dqdimacs_example():
    inst = parse_dqdimacs("p cnf 2 1\na 1 0\nd 2 1 0\n2 -1 0\n")
    assert inst.universals == ("v1",)
    assert inst.existentials == (("v2", ("v1",)),)
    assert inst.matrix == Or(prop("v2"), Not(prop("v1")))


def test_dqdimacs_empty_matrix():
    inst = parse_dqdimacs("p cnf 0 0\n")
    assert inst.matrix == TRUE
    assert inst.universals == () and inst.existentials == ()


def test_dqdimacs_e_line_depends_on_earlier_universals():
    inst = parse_dqdimacs((DATA / "dqdimacs" / "e_line.dqdimacs").read_text())
    assert inst.existentials == (("v2", ("v1",)),)
    assert inst.universals == ("v1", "v3")


def test_dqdimacs_comments_and_blank_lines():
    inst = parse_dqdimacs("c hello\n\np cnf 2 1\nc mid\na 1 0\nd 2 1 0\n1 2 0\n")
    assert inst.matrix == Or(prop("v1"), prop("v2"))


def test_dqdimacs_dependency_must_be_universal():
    with pytest.raises(UndeclaredVariable):
        parse_dqdimacs("p cnf 3 1\na 1 0\nd 2 3 0\n1 2 0\n")


def test_dqdimacs_header_mismatch():
    with pytest.raises(HeaderMismatch):
        parse_dqdimacs("p cnf 2 2\na 1 0\nd 2 1 0\n1 2 0\n")


def test_dqdimacs_round_trip():
    for path in sorted((DATA / "dqdimacs").glob("*.dqdimacs")):
        inst = parse_dqdimacs(path.read_text())
        assert parse_dqdimacs(print_dqdimacs(inst)) == inst


def test_dqbf_instance_validates_dependencies():
    with pytest.raises(UndeclaredVariable):
        DqbfInstance(("x",), (("y", ("z",)),), TRUE)
