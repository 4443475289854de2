"""Tableaus of a phased alternating machine and the oracle-level simulation.

Run with ``python notebooks/04_tableau.py``.
"""
from qbsf import toys
from qbsf.tableau import direct_accepts, simulate_phases, tableau_to_oracle, verify_simulation

M = toys.atm_exists_forall()
x = "10"
print(f"phase length {M.n}, phases {M.m}, row width {M.width}, word bits {M.h}")

for i, root in enumerate(simulate_phases(M, x)):
    print(f"first-phase tableau {i}:")
    for row in root.rows:
        print("   ", " ".join(row))
    print("    encoded as", len(tableau_to_oracle(M, root.rows).words), "words")

print("direct simulation accepts:", direct_accepts(M, x))
report = verify_simulation(M, x)
print("quantified evaluation    :", report.quantified)
print("agree:", report.agree, "tuples checked:", report.tuples_checked, "max questions per branch:",
      report.max_queries_per_branch)
