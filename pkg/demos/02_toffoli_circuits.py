"""
Toffoli circuits on a statevector
=================================

Compare the two Toffoli decompositions against the exact gate, then run the
measurement gadget that consumes a Toffoli state on all 64 outcome branches.
"""

import itertools

import numpy as np

from toffoli_hybrid.circuits import (
    DenseState,
    ccx_matrix,
    enumerate_branches,
    equal_up_to_phase,
    gadget_input,
    register_deviation,
    simulate_unitary,
    toffoli_decomposition_hybrid,
    toffoli_decomposition_standard,
    toffoli_gadget,
)

# Fifteen gates, seven of them T or T^dagger.
std = toffoli_decomposition_standard()
print(std.dumps())
print("deviation from CCX:", equal_up_to_phase(simulate_unitary(std), ccx_matrix()))

# Hadamards moved through the target leave a circuit with no H on it.
hyb = toffoli_decomposition_hybrid()
print("gates on target:", sorted(hyb.kinds_on(2)))
print("deviation from CCX:", equal_up_to_phase(simulate_unitary(hyb), ccx_matrix()))

# The gadget: three measurements, classically controlled fix-ups.
gadget = toffoli_gadget()
print(gadget.dumps())
worst = 0.0
for a, b, c in itertools.product((0, 1), repeat=3):
    want = DenseState.basis([a, b, (a & b) ^ c]).amplitudes
    probs = []
    for br in enumerate_branches(gadget, gadget_input(a, b, c)):
        probs.append(br.probability)
        worst = max(worst, register_deviation(br.state, [0, 1, 2], want))
    assert np.isclose(sum(probs), 1.0)
print("worst output deviation over all branches:", worst)
