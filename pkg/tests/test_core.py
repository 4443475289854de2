import numpy as np
import pytest

from qbsf.core import (
    FALSE,
    TRUE,
    And,
    App,
    Const,
    Exists,
    Forall,
    Interpretation,
    Limits,
    Not,
    Or,
    TruthTable,
    alpha_rename,
    args_to_index,
    binders_above,
    entails,
    equivalent,
    evaluate,
    free_symbols,
    index_to_args,
    interpretation_space,
    positions,
    prop,
    satisfying_interpretations,
    subformula,
    substitute,
    truth_vector,
)
from qbsf.errors import (
    ArityMismatch,
    CaptureDetected,
    InconsistentArity,
    InvalidPath,
    LimitExceeded,
    UnboundSymbol,
)
from qbsf.textio import parse_formula as P

EXAMPLE = "exists f/2 forall x forall y (x & y <-> f(x,y))"


def test_bit_order_first_argument_most_significant():
    assert args_to_index((1, 0)) == 2
    assert index_to_args(2, 2) == (1, 0)
    assert [index_to_args(i, 2) for i in range(4)] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_truth_table_basics():
    AND = TruthTable.from_function(2, lambda a, b: a & b)
    assert str(AND) == "0001"
    assert AND(1, 1) == 1 and AND(1, 0) == 0
    assert AND.rank == 1
    assert TruthTable.from_rank(2, 1) == AND
    assert TruthTable.from_string("0110") == TruthTable.from_function(2, lambda a, b: a ^ b)
    assert [str(t) for t in TruthTable.enumerate(1)] == ["00", "01", "10", "11"]
    with pytest.raises(ArityMismatch):
        AND(1)
    with pytest.raises(ValueError):
        TruthTable(1, (0, 1, 1))


def test_interpretation_accepts_ints_and_reports_unbound():
    I = Interpretation({"x": 1})
    assert I["x"] == TruthTable(0, (1,))
    with pytest.raises(UnboundSymbol):
        I["y"]


def test_free_symbols_examples():
    assert free_symbols(P("1")) == {}
    assert free_symbols(P(EXAMPLE)) == {}
    assert free_symbols(P("f(x, 0)")) == {"f": 2, "x": 0}
    assert free_symbols(P("exists x (x & y)")) == {"y": 0}


def test_inconsistent_free_arity():
    phi = And(App("f", (prop("x"),)), App("f", ()))
    with pytest.raises(InconsistentArity):
        free_symbols(phi)


def test_evaluate_examples():
    OR = TruthTable.from_function(2, lambda a, b: a | b)
    assert evaluate(P("f(x, ~x)"), {"f": OR, "x": 1}) == 1
    assert evaluate(P("exists p p")) == 1
    assert evaluate(P("forall p p")) == 0
    assert evaluate(P(EXAMPLE)) == 1
    assert evaluate(P("exists f/1 forall x (f(x) & ~f(x))")) == 0


def test_evaluate_unbound_symbol():
    with pytest.raises(UnboundSymbol):
        evaluate(P("x & y"), {"x": 1})


def test_evaluate_respects_arity_limit():
    with pytest.raises(LimitExceeded):
        evaluate(P("exists f/3 f(0,0,0)"), {}, Limits(max_arity=2))


def test_evaluate_nested_argument_formula():
    # arguments may themselves be formulas, including quantified ones
    assert evaluate(P("forall f/1 (f(exists p p) <-> f(1))")) == 1
    assert evaluate(P("forall f/1 (f(x & ~x) <-> f(0))"), {"x": 1}) == 1


def test_shadowing_inner_binder_wins():
    assert evaluate(P("exists p (p & forall p (p | ~p))")) == 1
    assert evaluate(P("forall p (p | exists p ~p)")) == 1
    assert evaluate(P("forall p exists p p")) == 1


def test_long_proposition_block_uses_clause_search():
    # 20 universal propositions over a clausal matrix: far too many to enumerate naively per node
    names = [f"v{i}" for i in range(20)]
    matrix = And(Or(prop("v0"), Not(prop("v0"))), Or(prop("v19"), Not(prop("v19"))))
    phi = matrix
    for n in reversed(names):
        phi = Forall(n, 0, phi)
    assert evaluate(phi) == 1
    bad = And(prop("v0"), prop("v1"))
    for n in reversed(names):
        bad = Forall(n, 0, bad)
    assert evaluate(bad) == 0


def test_interpretation_space_order():
    names, env, rows = interpretation_space({"x": 0, "f": 1})
    assert names == ["f", "x"]
    assert rows == 8
    # last name varies fastest
    assert env["x"][:, 0].tolist() == [0, 1] * 4
    assert env["f"][::2].tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]


def test_truth_vector_and_satisfying_sets():
    v = truth_vector(P("x & y"))
    assert v.tolist() == [False, False, False, True]
    sats = satisfying_interpretations(P("x | y"))
    assert len(sats) == 3


def test_equivalent_examples():
    assert equivalent(P("x & y"), P("~(~x | ~y)"))
    assert equivalent(P("exists f/1 f(x)"), P("1"))
    assert equivalent(P("forall p p"), P("0"))
    assert not equivalent(P("x"), P("y"))
    assert entails(P("x & y"), P("x"))
    assert not entails(P("x"), P("x & y"))


def test_positions_and_subformula():
    phi = P("x & ~y")
    assert list(positions(phi)) == [(), (0,), (1,), (1, 0)]
    assert subformula(phi, (1, 0)) == prop("y")
    with pytest.raises(InvalidPath):
        subformula(phi, (2,))


def test_substitute_examples():
    phi = P(EXAMPLE)
    # replace x & y (left side of the biconditional) by its De Morgan form
    target = None
    for pos in positions(phi):
        if subformula(phi, pos) == P("x & y"):
            target = pos
            break
    assert target is not None
    out = substitute(phi, target, P("~(~x | ~y)"))
    assert out != phi
    assert evaluate(out) == evaluate(phi) == 1
    assert substitute(phi, (), TRUE) == TRUE
    assert binders_above(phi, target) == {"f": 2, "x": 0, "y": 0}
    with pytest.raises(CaptureDetected):
        substitute(phi, target, P("f(x, y)"))


def test_alpha_rename_removes_shadowing():
    out = alpha_rename(P("exists p (p & exists p p)"))
    assert out == P("exists p1 (p1 & exists p2 p2)")
    phi = P(EXAMPLE)
    assert evaluate(alpha_rename(phi)) == evaluate(phi)
    assert free_symbols(alpha_rename(P("exists q (q & r)"))) == {"r": 0}


def test_operator_sugar():
    x, y = prop("x"), prop("y")
    assert (x & y) == And(x, y)
    assert (x | ~y) == Or(x, Not(y))
    assert Const(1) == TRUE and Const(0) == FALSE


def test_quantifier_equality_and_hash_on_long_prefix():
    phi = TRUE
    for i in range(3000):
        phi = Exists(f"v{i}", 0, phi)
    psi = TRUE
    for i in range(3000):
        psi = Exists(f"v{i}", 0, psi)
    assert phi == psi and hash(phi) == hash(psi)
    assert Exists("x", 0, TRUE) != Forall("x", 0, TRUE)
    assert Exists("x", 0, TRUE) != Exists("x", 1, TRUE)


def test_evaluate_batches_rows():
    v = truth_vector(P("exists g/2 (g(x, y) <-> f(x))"), {"f": 1, "x": 0, "y": 0})
    assert v.dtype == np.bool_ and v.all()


def test_long_block_search_matches_enumeration(monkeypatch):
    import random

    import formula_gen as gen
    from qbsf import core

    rng = random.Random(11)
    pick = gen.from_random(rng)
    names = [f"x{i}" for i in range(18)]
    atoms = [prop(n) for n in names] + [prop("y")]
    shapes = []
    for trial in range(12):
        items = gen.random_clausal(pick, atoms, 6 + pick(30), 3)
        shapes.append(("exists" if trial % 2 == 0 else "forall", items))

    def build(kind, items):
        # the shapes the clause search accepts
        phi = gen.cnf(items) if kind == "exists" else gen.dnf(items)
        for n in reversed(names):
            phi = core.quantifier(kind, n, 0, phi)
        return phi

    fast = [[evaluate(build(*s), {"y": y}) for y in (0, 1)] for s in shapes]
    # fresh trees, so no cached search block is reused
    monkeypatch.setattr(core, "ENUM_BLOCK", 64)
    big = core.Limits(max_steps=1 << 34)
    slow = [[evaluate(build(*s), {"y": y}, big) for y in (0, 1)] for s in shapes]
    assert fast == slow
    assert {v for row in fast for v in row} == {0, 1}
