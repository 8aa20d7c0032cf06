"""
Triorthogonal codes and transversal gates
=========================================

Build the [[15,1,3]] code, its mirror, and check which gates act transversally.
Run with ``python demos/01_codes_and_transversal_gates.py``.
"""

from toffoli_hybrid.codes import build_triorthogonal, builtin_15_1_3, check_triorthogonal, mirror
from toffoli_hybrid.gf2 import BinaryMatrix
from toffoli_hybrid.transversality import (
    HybridSystem,
    verify_cnot_coset,
    verify_t_transversality,
    verify_toffoli_transversality,
)

# The generator: one odd-weight row (all ones) above the four Hamming rows.
q = builtin_15_1_3()
print(q.generator)
print(check_triorthogonal(q.generator).as_dict())

# The mirror swaps the X and Z sides; its logical map is the dual basis.
m = mirror(q)
print("A.B^T =", q.base.map_a.gram(m.map_a))

# T acts transversally on the code, with a logical sign flip.
t = verify_t_transversality(q)
print("T holds:", t.holds, "induced sign:", t.induced_sign)

# CNOT only works one way round: code to mirror, not back.
print("CNOT q -> mirror:", verify_cnot_coset(q.base, m).holds)
print("CNOT mirror -> q:", verify_cnot_coset(m, q.base).holds)

# Toffoli on (q, q, mirror) holds on every basis triple.
tof = verify_toffoli_transversality(HybridSystem.from_triorthogonal(q))
print("Toffoli holds:", tof.holds, "checks:", tof.checks_performed)

# Three copies of the same code is not enough, and the witness says why.
bad = verify_toffoli_transversality(HybridSystem(q.base, q.base, q.base))
print("Toffoli on (q, q, q):", bad.holds, bad.witness)

# A code that fails the weight condition is rejected as well.
small = build_triorthogonal(BinaryMatrix.from_rows(["111"]))
print("[[3,1]] T holds:", verify_t_transversality(small).holds)
