"""
Distillation rounds and qubit cost
==================================

Exact error polynomials, the threshold, a seeded Monte Carlo check, level
iteration and the expected qubit cost of three protocols.
"""

import tempfile

from toffoli_hybrid.codes import builtin_15_1_3
from toffoli_hybrid.cost import (
    band_overlap_fraction,
    competitive_band,
    fig6_rows,
    optimize_k,
    plan_direct15,
    plan_magic15,
    write_plot_data,
)
from toffoli_hybrid.distill import (
    TruncatedModel,
    analyze_block,
    exact_report,
    find_threshold,
    iterate_levels,
    monte_carlo,
    toffoli_threshold,
)
from toffoli_hybrid.transversality import HybridSystem

q = builtin_15_1_3()
block = analyze_block(q)

# Low-order terms of the acceptance and output-error polynomials.
print("accept series:", block.accept_series()[:4])
print("fail series:", block.fail_series()[:6])

# Fixed point of p -> output error, and the Toffoli-level figure.
p_star = find_threshold(block)
print(f"threshold {p_star:.4f}, Toffoli threshold {toffoli_threshold(p_star):.4f}")

# Sampling agrees with the exact numbers.
system = HybridSystem.from_triorthogonal(q)
print(exact_report(system, 0.05).as_dict())
print(monte_carlo(system, 0.05, 200_000, seed=1).as_dict())

# Two levels bring 1e-2 down to about 1e-12.
for trace in (iterate_levels(1e-2, 1e-12, TruncatedModel()), iterate_levels(1e-2, 1e-12, block)):
    print([f"{t.p_out:.3g}" for t in trace])

# Cost of the three routes at one target.
print("direct 15-to-1:", plan_direct15(1e-2, 1e-12).expected_qubits)
print("via magic states:", plan_magic15(1e-2, 1e-12).expected_qubits)
best = optimize_k(1e-2, 1e-12)
print("3k+8 family:", best.expected_qubits, "schedule", best.k_schedule)

# Which k stay near the optimum across targets.
band = competitive_band(fig6_rows(1e-2))
print("competitive k per target:", band)
print("overlap with k in 2..13:", band_overlap_fraction(band))

out = tempfile.mkdtemp()
print("plot data:", write_plot_data(out))
