"""Encoding an oracle machine run as a formula over oracle symbols.

Run with ``python notebooks/03_machine_encoding.py``.
"""
from qbsf import classify, decide
from qbsf import toys
from qbsf.core import evaluate
from qbsf.machineenc import OracleFamily, encode_run, oracle_names, run_machine, strip_oracles

M = toys.mq()  # accepts exactly when the oracle answers yes on the input bit
for oracle in ([], ["1"]):
    fam = OracleFamily.of([oracle], M.query_bits)
    run = run_machine(M, "1", fam)
    print(f"oracle {oracle!r:6}: states {[c.state for c in run.trace]} accept={run.accept}")

phi = encode_run(M, "1", "exists")
print("signature of the encoding:", classify(phi)["signature"])
print("exists oracle accepting:", decide(phi).value)
print("forall oracles accepting:", decide(encode_run(M, "1", "forall")).value)

# The quantifier-free part agrees with the run for each fixed oracle.
inner = strip_oracles(phi, M)
for oracle in ([], ["0"], ["1"], ["0", "1"]):
    fam = OracleFamily.of([oracle], M.query_bits)
    print(oracle, evaluate(inner, fam.tables(oracle_names(M))), run_machine(M, "1", fam).accept)
