import csv
import itertools
import math

import numpy as np
import pytest

from toffoli_hybrid.cost import (
    DEFAULT_GRID,
    FIG5_HEADER,
    FIG6_HEADER,
    PROTOCOLS,
    CostError,
    UnreachableTargetError,
    band_overlap_fraction,
    competitive_band,
    cost_curves,
    cost_direct15,
    cost_family3k8,
    cost_magic15,
    direct15_numerator,
    fig6_rows,
    magic15_numerator,
    optimize_k,
    plan_direct15,
    plan_magic15,
    uniform_k_plan,
    write_plot_data,
)
from toffoli_hybrid.distill import Family3k8, builtin_hybrid_analysis, iterate_levels, target_met


def family_cost_oracle(schedule, p0):
    """Independent evaluation: 3 * prod (3k+8)/k / prod accept^3."""
    q, p = 3.0, p0
    for k in schedule:
        if (3 * k + 8) * p >= 1:
            return None, None
        q *= (3 * k + 8) / k / (1 - (3 * k + 8) * p) ** 3
        p = (1 + 3 * k) * p * p
    return q, p


def test_numerators():
    assert direct15_numerator(1) == 45
    assert direct15_numerator(2) == 720
    assert magic15_numerator(1) == 105 and magic15_numerator(2) == 1575
    assert abs(magic15_numerator(2) / direct15_numerator(2) - 2.1875) < 1e-12
    for m in range(1, 12):
        ratio = direct15_numerator(m) / magic15_numerator(m)
        assert ratio == (3 * 15**m + 45 * (m - 1)) / (7 * 15**m)
    assert abs(direct15_numerator(30) / magic15_numerator(30) - 3 / 7) < 1e-9
    with pytest.raises(CostError):
        direct15_numerator(0)


def test_direct_cost_uses_level_acceptance():
    h = builtin_hybrid_analysis()
    p1 = h.output_error(1e-2)
    p_suc = h.accept(1e-2) * h.accept(p1)
    assert abs(cost_direct15(2, 1e-2) - 720 / p_suc) < 1e-9
    assert cost_direct15(2, 0.0) == 720


def test_magic_treatments():
    d = cost_direct15(2, 1e-2)
    matched = cost_magic15(2, 1e-2)
    assert abs(matched / d - 1575 / 720) < 1e-12
    t_state = cost_magic15(2, 1e-2, "t_state")
    per_state = cost_magic15(2, 1e-2, "per_state")
    assert t_state < matched < per_state
    with pytest.raises(CostError):
        cost_magic15(2, 1e-2, "bogus")


def test_plans_at_headline_point():
    d = plan_direct15(1e-2, 1e-12)
    m = plan_magic15(1e-2, 1e-12)
    assert len(d.levels) == 2 and len(m.levels) == 2
    assert 2.0 <= m.expected_qubits / d.expected_qubits <= 2.4
    assert d.meets_target and not d.as_dict()["strictly_below_target"]
    assert d.achieved_error == iterate_levels(1e-2, 1e-12, builtin_hybrid_analysis())[-1].p_out


def test_family_plan_examples():
    one = cost_family3k8([8], 1e-2, 1e-3)
    accept = (1 - 32e-2) ** 3
    assert abs(one.expected_qubits * accept - 12) < 1e-12
    empty = cost_family3k8([], 1e-3, 1e-3)
    assert empty.levels == [] and empty.expected_qubits == 3.0 and empty.metadata["input_states"] == 1
    a = cost_family3k8([2], 1e-2, 1e-4).achieved_error
    b = cost_family3k8([13], 1e-2, 1e-4).achieved_error
    # (1 + 3k) p^2: 7e-4 for k = 2 and 40e-4 for k = 13
    assert math.isclose(a, 7e-4) and math.isclose(b, 40e-4)
    with pytest.raises(CostError):
        cost_family3k8([51], 1e-3, 1e-6)


def test_family_plan_recomputed_by_distill():
    plan = optimize_k(1e-2, 1e-10)
    models = [Family3k8(k) for k in plan.k_schedule]
    trace = iterate_levels(1e-2, 1e-10, models)
    assert trace[-1].p_out == plan.achieved_error
    assert plan.meets_target


def brute_force_optimum(p0, target, max_levels, ks):
    best = None
    for depth in range(max_levels + 1):
        for sched in itertools.product(ks, repeat=depth):
            q, p = family_cost_oracle(sched, p0)
            if q is None or not target_met(p, target):
                continue
            # schedules that meet the target early and keep going are never optimal
            if any(target_met(family_cost_oracle(sched[:i], p0)[1], target) for i in range(depth)):
                continue
            key = (q, depth, sched)
            if best is None or key < best:
                best = key
    return best


@pytest.mark.parametrize("target", [1e-4, 1e-6, 1e-8])
def test_optimizer_matches_brute_force(target):
    best = brute_force_optimum(1e-2, target, 3, range(1, 13))
    plan = optimize_k(1e-2, target, max_levels=3, k_range=(1, 12))
    assert tuple(plan.k_schedule) == best[2]
    assert math.isclose(plan.expected_qubits, best[0], rel_tol=1e-12)


def test_optimizer_beats_random_schedules():
    rng = np.random.default_rng(7)
    target = 1e-12
    plan = optimize_k(1e-2, target)
    tried = 0
    while tried < 100:
        sched = list(rng.integers(1, 51, size=rng.integers(1, 7)))
        q, p = family_cost_oracle(sched, 1e-2)
        if q is None or not target_met(p, target):
            continue
        tried += 1
        assert plan.expected_qubits <= q * (1 + 1e-12)


def test_optimizer_edges():
    assert optimize_k(1e-3, 1e-3).k_schedule == []
    with pytest.raises(UnreachableTargetError):
        optimize_k(1e-2, 1e-300, max_levels=2)
    assert uniform_k_plan(50, 1e-2, 1e-6) is None


def test_curves_monotone():
    curve = cost_curves()
    assert curve.targets == sorted(DEFAULT_GRID, reverse=True)
    for name in PROTOCOLS:
        costs = curve.expected_qubits[name]
        assert all(c is not None for c in costs)
        assert all(b >= a for a, b in itertools.pairwise(costs))
    i = curve.targets.index(1e-12)
    assert len(curve.plans["direct15"][i].levels) == 2
    with pytest.raises(CostError):
        cost_curves(targets=[1e-3, 1e-3])


def test_plot_data(tmp_path):
    f5, f6 = write_plot_data(tmp_path)
    with open(f5) as fh:
        rows5 = list(csv.reader(fh))
    with open(f6) as fh:
        rows6 = list(csv.reader(fh))
    assert tuple(rows5[0]) == FIG5_HEADER and tuple(rows6[0]) == FIG6_HEADER
    assert len(rows5) == 1 + 3 * len(DEFAULT_GRID)
    band = competitive_band(fig6_rows())
    assert band_overlap_fraction(band) >= 0.5
