import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formula_gen import closed_formulas
from qbsf.analysis import (
    NONE,
    OMEGA,
    PI,
    SIGMA,
    FragmentSignature,
    classify,
    clauses_of,
    in_fragment,
    is_cnf,
    is_dnf,
    is_literal,
    is_prenex,
    is_simple,
    is_uniq,
    signature_of,
    terms_of,
)
from qbsf.errors import NotPrenex, NotSplittable
from qbsf.textio import parse_formula as P
from qbsf.transforms import to_prenex

EXAMPLE = P("exists f/2 forall x forall y (x & y <-> f(x,y))")


def test_example_properties():
    assert is_prenex(EXAMPLE)
    assert is_simple(EXAMPLE)
    assert not is_cnf(EXAMPLE)
    assert is_uniq(EXAMPLE)


def test_cnf_example():
    phi = P("exists f/1 forall x (f(x) | ~x) & (x | 1)")
    assert is_cnf(phi)
    assert not is_dnf(phi)
    assert len(clauses_of(phi.body.body)) == 2


def test_single_clause_is_both():
    phi = P("forall x x | ~y | f(x)")
    assert is_cnf(phi) and is_dnf(phi)
    assert terms_of(phi.body) is not None


def test_simple_and_literals():
    assert not is_simple(P("f(g(x))"))
    assert is_simple(P("f(x, 0)"))
    assert is_literal(P("~f(x, 1)"))
    assert not is_literal(P("~~x"))
    assert not is_literal(P("f(~x)"))


def test_uniq_examples():
    assert not is_uniq(P("f(x,y) & f(y,x)"))
    assert is_uniq(P("f(x,y) | ~f(x,y)"))


def test_prenex():
    assert is_prenex(P("exists x forall y x & y"))
    assert not is_prenex(P("x & exists y y"))
    assert is_prenex(P("1"))


def test_signature_examples():
    assert signature_of(EXAMPLE) == FragmentSignature(SIGMA, 1, 1, PI, 2, 1)
    sig = signature_of(P("forall p exists q (p | q)"))
    assert sig == FragmentSignature(NONE, 0, 0, PI, 2, 2)
    assert signature_of(P("1")) == FragmentSignature()
    with pytest.raises(NotSplittable):
        signature_of(P("exists f/2 exists x forall g/1 g(x) & f(x, x)"))
    with pytest.raises(NotPrenex):
        signature_of(P("x & exists y y"))


def test_arity_zero_binder_inside_function_block():
    # no minimal signature, yet membership with a function block of mixed arities holds
    phi = P("exists f/1 forall g/0 exists h/1 forall x f(x) | h(x) | g")
    with pytest.raises(NotSplittable):
        signature_of(phi)
    assert in_fragment(phi, FragmentSignature.parse("Sigma^3_3 Pi^1_1"))
    assert not in_fragment(phi, FragmentSignature.parse("Sigma^2_2 Pi^2_2"))


def test_membership_examples():
    assert in_fragment(EXAMPLE, FragmentSignature.parse("Sigma^w_1 Pi^w_1"))
    assert not in_fragment(EXAMPLE, FragmentSignature.parse("Pi^1_1 Sigma^w_w"))
    assert not in_fragment(EXAMPLE, FragmentSignature.parse("Sigma^1_1 Pi^1_1"))
    assert in_fragment(EXAMPLE, FragmentSignature.parse("Sigma^1_1 Pi^2_1"))


def test_signature_text_round_trip():
    for text in ["Sigma^1_1 Pi^2_1", "- Pi^w_w", "Pi^3_2 -"]:
        assert str(FragmentSignature.parse(text)) == text
    assert FragmentSignature.parse("Sigma^omega_1 -").so_count == OMEGA


def test_signature_validation():
    with pytest.raises(ValueError):
        FragmentSignature(SIGMA, 1, 2, NONE, 0, 0)
    with pytest.raises(ValueError):
        FragmentSignature(NONE, 1, 1, NONE, 0, 0)


def test_classify_report():
    rep = classify(EXAMPLE)
    assert rep == {
        "prenex": True,
        "simple": True,
        "cnf": False,
        "dnf": False,
        "uniq": True,
        "signature": {"soType": "Sigma", "soCount": 1, "soAlt": 1, "foType": "Pi", "foCount": 2, "foAlt": 1},
    }
    rep = classify(P("1"))
    assert rep["prenex"] and rep["signature"]["soType"] == "none" and rep["signature"]["foCount"] == 0
    assert classify(P("x & exists y y"))["signature"] is None


def _weaken(sig):
    """Componentwise larger signatures, with omega as the top value."""
    for so_c, so_a, fo_c, fo_a in itertools.product(
        (sig.so_count, sig.so_count + 1, OMEGA),
        (sig.so_alt, OMEGA),
        (sig.fo_count, OMEGA),
        (sig.fo_alt, sig.fo_alt + 1, OMEGA),
    ):
        so_t = sig.so_type if sig.so_type != NONE else SIGMA
        fo_t = sig.fo_type if sig.fo_type != NONE else PI
        try:
            yield FragmentSignature(so_t, max(so_c, 1), so_a, fo_t, max(fo_c, 1), fo_a)
        except ValueError:
            continue


@settings(max_examples=120, deadline=None)
@given(closed_formulas())
def test_signature_membership_and_monotonicity(phi):
    phi = to_prenex(phi) if is_simple(phi) else phi
    if not is_prenex(phi):
        return
    try:
        sig = signature_of(phi)
    except NotSplittable:
        return
    assert in_fragment(phi, sig)
    for bigger in _weaken(sig):
        assert in_fragment(phi, bigger)


@settings(max_examples=120, deadline=None)
@given(closed_formulas(max_quant=2, depth=3))
def test_cnf_and_dnf_together_only_for_single_items(phi):
    if is_cnf(phi) and is_dnf(phi):
        from qbsf.core import split_prefix

        _, matrix = split_prefix(phi)
        assert len(clauses_of(matrix)) == 1 or len(terms_of(matrix)) == 1


@given(st.sampled_from([SIGMA, PI]), st.integers(1, 4), st.integers(1, 4))
def test_parse_matches_constructor(t, c, a):
    if a > c:
        return
    assert FragmentSignature.parse(f"{t}^{c}_{a} -") == FragmentSignature(t, c, a, NONE, 0, 0)
