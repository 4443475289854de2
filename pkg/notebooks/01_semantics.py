"""Truth tables, evaluation and the solver on a small second-order formula.

Run with ``python notebooks/01_semantics.py``.
"""
from qbsf import TruthTable, decide, evaluate, parse_formula, print_formula
from qbsf.solver import strip_witness

# Is there a binary function that agrees with conjunction everywhere?
phi = parse_formula("exists f/2 forall x forall y (x & y <-> f(x,y))")
print("formula:", print_formula(phi))

# Tables list outputs for arguments 00, 01, 10, 11 (first argument is the high bit).
for table in TruthTable.enumerate(2):
    body = strip_witness(phi, {"f": table})
    print(f"  f = {table}: body evaluates to {evaluate(body, {'f': table})}")

verdict = decide(phi)
print("decide:", "TRUE" if verdict.value else "FALSE", "witness f =", verdict.witness["f"])

# Swapping the quantifier order of the propositions changes the answer.
for text in ["forall p exists q (p <-> q)", "exists q forall p (p <-> q)"]:
    print(f"{text:32s} -> {decide(parse_formula(text)).value}")
