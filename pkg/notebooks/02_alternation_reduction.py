"""Folding a block of first-order quantifiers into one extra function symbol.

Run with ``python notebooks/02_alternation_reduction.py``.
"""
from qbsf import alt_reduce, classify, decide, parse_formula, print_formula

phi = parse_formula("exists f/1 exists x1 f(x1)")
out = alt_reduce(phi)
print("input :", print_formula(phi))
print("output:", print_formula(out))
print("signature before:", classify(phi)["signature"])
print("signature after :", classify(out)["signature"])
print("same truth value:", decide(phi).value == decide(out).value)

# A universal instance with a DNF matrix reduces to a DNF formula under forall.
psi = parse_formula("forall f/1 forall x1 f(x1) | ~f(0)")
red = alt_reduce(psi)
print()
print("input :", print_formula(psi))
print("output:", print_formula(red))
print("values:", decide(psi).value, decide(red).value)
