"""Expected qubit cost of Toffoli-state factories.

Three routes:

* ``direct15``: hybrid 15-qubit blocks, ``(3 15^m + 45 (m-1)) / p_suc``.
* ``magic15``: seven distilled T states per Toffoli, ``7 15^m / p_suc``.
* ``family3k8``: ``[[3k+8, k, 2]]`` blocks with a per-level ``k`` schedule,
  ``Q_0 = 3`` and ``Q_m = (3k_m+8)/k_m * Q_{m-1} / p_suc(m)``, so one level
  costs ``3 (3k+8)/k`` like the ``3 * 15`` of the first route.

``p_suc`` compounds the all-block acceptance of every level; each level's
input rate comes from the level iteration.  Targets are met in the
order-of-magnitude sense of :func:`~toffoli_hybrid.distill.target_met`.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .codes import builtin_15_1_3
from .distill import (
    MAX_LEVELS,
    DistillError,
    Family3k8,
    HybridAnalysis,
    LevelTrace,
    ValidityWindowError,
    analyze_block,
    builtin_hybrid_analysis,
    family_3k8,
    iterate_levels,
    target_met,
)

PROTOCOLS = ("direct15", "magic15", "family3k8")
K_RANGE = (1, 50)
MAX_SCHEDULE_LEVELS = 6
DEFAULT_P0 = 1e-2
DEFAULT_GRID = tuple(10.0**-e for e in range(3, 15))
FIG5_HEADER = ("target_error", "protocol", "expected_qubits", "levels", "k_schedule")
FIG6_HEADER = ("target_error", "k", "expected_qubits")

# magic15 success-probability treatments
MAGIC_PSUC = ("matched", "t_state", "per_state")


class CostError(ValueError):
    pass


class UnreachableTargetError(CostError):
    pass


@dataclass
class CostPlan:
    protocol: str
    p0: float
    target: float
    levels: list[LevelTrace]
    expected_qubits: float
    achieved_error: float
    k_schedule: list[int] = field(default_factory=list)
    p_suc: float = 1.0
    metadata: dict = field(default_factory=dict)

    @property
    def meets_target(self) -> bool:
        return target_met(self.achieved_error, self.target, self.metadata.get("decade_tolerance", 0.5))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["levels"] = [asdict(t) for t in self.levels]
        out["n_levels"] = len(self.levels)
        out["strictly_below_target"] = self.achieved_error <= self.target
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


@dataclass
class CostCurve:
    p0: float
    targets: list[float]
    expected_qubits: dict[str, list[float | None]]
    plans: dict[str, list[CostPlan | None]]


# 15-to-1 routes -----------------------------------------------------------------


def direct15_numerator(m: int) -> int:
    if m < 1:
        raise CostError("m must be at least 1")
    return 3 * 15**m + 45 * (m - 1)


def magic15_numerator(m: int) -> int:
    if m < 1:
        raise CostError("m must be at least 1")
    return 7 * 15**m


def _hybrid() -> HybridAnalysis:
    return builtin_hybrid_analysis()


def _run_levels(model, p0: float, m: int) -> list[LevelTrace]:
    """Exactly ``m`` levels of ``model`` from ``p0``."""
    out = []
    p = p0
    for level in range(1, m + 1):
        nxt = model.output_error(p)
        if nxt >= p > 0:
            raise DistillError(f"p = {p:.4g} is not below the threshold")
        out.append(LevelTrace(level, p, nxt, model.accept(p)))
        p = nxt
    return out


def _psuc(levels: Sequence[LevelTrace]) -> float:
    return math.prod(t.accept_prob for t in levels)


def cost_direct15(m: int, p0: float, model: HybridAnalysis | None = None) -> float:
    levels = _run_levels(model or _hybrid(), p0, m)
    return direct15_numerator(m) / _psuc(levels)


def _magic_psuc(m: int, p0: float, treatment: str) -> float:
    if treatment == "matched":
        return _psuc(_run_levels(_hybrid(), p0, m))
    block = analyze_block(builtin_15_1_3())
    single = _psuc(_run_levels(block, p0, m))
    if treatment == "t_state":
        return single
    if treatment == "per_state":
        return single**7
    raise CostError(f"unknown p_suc treatment {treatment!r}; pick one of {MAGIC_PSUC}")


def cost_magic15(m: int, p0: float, psuc: str = "matched") -> float:
    """``7 15^m / p_suc``.

    ``psuc`` picks the success probability: ``"matched"`` reuses the direct
    route's value so the comparison isolates the numerators; ``"t_state"``
    compounds one 15-qubit block per level; ``"per_state"`` raises that to
    the 7th power (independent retries for every T state).
    """
    return magic15_numerator(m) / _magic_psuc(m, p0, psuc)


def _plan_15(protocol: str, p0: float, target: float, decade_tolerance: float, psuc: str) -> CostPlan:
    model = _hybrid()
    levels = iterate_levels(p0, target, model, decade_tolerance)
    m = len(levels)
    achieved = levels[-1].p_out if levels else p0
    meta = {"decade_tolerance": decade_tolerance, "error_model": "exact polynomials, hybrid (Q, Q, mirror)"}
    if protocol == "direct15":
        p_suc = _psuc(levels)
        cost = direct15_numerator(m) / p_suc if m else 3.0
    else:
        p_suc = _magic_psuc(m, p0, psuc) if m else 1.0
        cost = magic15_numerator(m) / p_suc if m else 7.0
        meta["p_suc_treatment"] = psuc
        meta["retries"] = "independent"
    return CostPlan(protocol, p0, target, levels, cost, achieved, [], p_suc, meta)


def plan_direct15(p0: float, target: float, decade_tolerance: float = 0.5) -> CostPlan:
    return _plan_15("direct15", p0, target, decade_tolerance, "matched")


def plan_magic15(p0: float, target: float, decade_tolerance: float = 0.5, psuc: str = "matched") -> CostPlan:
    return _plan_15("magic15", p0, target, decade_tolerance, psuc)


# [[3k+8, k, 2]] family -------------------------------------------------------------


def _family_step(k: int, p: float) -> tuple[float, float, float]:
    """(factor, p_out, accept) for one level; accept covers all three blocks."""
    rec = family_3k8(k, p)
    accept = rec["accept"] ** 3
    return (3 * k + 8) / k / accept, rec["output_error"], accept


def _check_k(k: int) -> None:
    if not K_RANGE[0] <= k <= K_RANGE[1]:
        raise CostError(f"k = {k} outside {K_RANGE}")


def cost_family3k8(k_schedule: Sequence[int], p0: float, target: float, decade_tolerance: float = 0.5) -> CostPlan:
    """Cost of a fixed schedule; every level in it is applied."""
    if len(k_schedule) > MAX_LEVELS:
        raise UnreachableTargetError(f"more than {MAX_LEVELS} levels")
    q, p = 3.0, p0  # one raw Toffoli state
    levels = []
    for m, k in enumerate(k_schedule, start=1):
        _check_k(k)
        factor, nxt, accept = _family_step(k, p)
        levels.append(LevelTrace(m, p, nxt, accept))
        q *= factor
        p = nxt
    meta = {
        "decade_tolerance": decade_tolerance,
        "model": "3k+8 lower-level Toffoli states yield k; retries divide by the cubed block acceptance",
        "input_states": 1,
        "error_model": "leading-order (1+3k) p^2",
    }
    return CostPlan("family3k8", p0, target, levels, q, p, list(k_schedule), _psuc(levels), meta)


def optimize_k(
    p0: float,
    target: float,
    max_levels: int = MAX_SCHEDULE_LEVELS,
    k_range: tuple[int, int] = K_RANGE,
    decade_tolerance: float = 0.5,
) -> CostPlan:
    """Cheapest schedule reaching ``target``.

    Exact search: per level only Pareto-optimal (error, cost) states are kept;
    a state with both higher error and higher cost can never finish cheaper
    because both the next error and the next cost factor grow with error.
    Ties go to fewer levels, then the lexicographically smaller schedule.
    """
    if target_met(p0, target, decade_tolerance):
        return cost_family3k8([], p0, target, decade_tolerance)
    frontier: list[tuple[float, float, tuple[int, ...]]] = [(p0, 3.0, ())]
    best: tuple[float, int, tuple[int, ...]] | None = None
    for _ in range(max_levels):
        nxt = []
        for p, q, sched in frontier:
            for k in range(k_range[0], k_range[1] + 1):
                try:
                    factor, p_out, _ = _family_step(k, p)
                except ValidityWindowError:
                    break  # larger k only narrows the window
                cand = (p_out, q * factor, sched + (k,))
                if target_met(p_out, target, decade_tolerance):
                    key = (cand[1], len(cand[2]), cand[2])
                    if best is None or key < best:
                        best = key
                elif p_out < p:
                    nxt.append(cand)
        frontier = _pareto(nxt)
        if best is not None:
            # anything still open needs at least one more costly level
            frontier = [s for s in frontier if s[1] * 3 < best[0]]
        if not frontier:
            break
    if best is None:
        raise UnreachableTargetError(f"target {target} not reachable from p0 = {p0} within {max_levels} levels")
    return cost_family3k8(list(best[2]), p0, target, decade_tolerance)


def _pareto(states):
    states.sort(key=lambda s: (s[0], s[1], s[2]))
    out = []
    best_cost = math.inf
    for s in states:
        if s[1] < best_cost:
            out.append(s)
            best_cost = s[1]
    return out


def uniform_k_plan(k: int, p0: float, target: float, decade_tolerance: float = 0.5) -> CostPlan | None:
    """Fewest levels of a fixed ``k`` reaching ``target``; None if impossible."""
    _check_k(k)
    try:
        levels = iterate_levels(p0, target, Family3k8(k), decade_tolerance, MAX_SCHEDULE_LEVELS)
    except DistillError:
        return None
    return cost_family3k8([k] * len(levels), p0, target, decade_tolerance)


# curves and CSV -------------------------------------------------------------------------


def cost_curves(
    p0: float = DEFAULT_P0,
    targets: Sequence[float] = DEFAULT_GRID,
    decade_tolerance: float = 0.5,
    psuc: str = "matched",
) -> CostCurve:
    targets = sorted((float(t) for t in targets), reverse=True)
    if len(set(targets)) != len(targets):
        raise CostError("targets must be distinct")
    makers = {
        "direct15": lambda t: plan_direct15(p0, t, decade_tolerance),
        "magic15": lambda t: plan_magic15(p0, t, decade_tolerance, psuc),
        "family3k8": lambda t: optimize_k(p0, t, decade_tolerance=decade_tolerance),
    }
    plans: dict[str, list[CostPlan | None]] = {}
    for name, make in makers.items():
        row = []
        for t in targets:
            try:
                row.append(make(t))
            except (DistillError, CostError):
                row.append(None)
        plans[name] = row
    costs = {name: [pl.expected_qubits if pl else None for pl in row] for name, row in plans.items()}
    return CostCurve(p0, targets, costs, plans)


def fig5_rows(curve: CostCurve) -> list[dict]:
    rows = []
    for i, t in enumerate(curve.targets):
        for name in PROTOCOLS:
            plan = curve.plans[name][i]
            rows.append(
                {
                    "target_error": t,
                    "protocol": name,
                    "expected_qubits": plan.expected_qubits if plan else "unreachable",
                    "levels": len(plan.levels) if plan else "",
                    "k_schedule": ";".join(map(str, plan.k_schedule)) if plan else "",
                }
            )
    return rows


def fig6_rows(
    p0: float = DEFAULT_P0,
    targets: Sequence[float] = DEFAULT_GRID,
    ks: Sequence[int] = range(1, 51),
    decade_tolerance: float = 0.5,
) -> list[dict]:
    """Uniform-k cost per target (unreachable points are omitted)."""
    rows = []
    for t in sorted(targets, reverse=True):
        for k in ks:
            plan = uniform_k_plan(k, p0, t, decade_tolerance)
            if plan is not None:
                rows.append({"target_error": float(t), "k": k, "expected_qubits": plan.expected_qubits})
    return rows


def competitive_band(rows: Sequence[dict], slack: float = 0.25) -> dict[float, tuple[int, int]]:
    """Per target, the (min, max) k whose uniform-k cost is within
    ``1 + slack`` of the cheapest uniform k."""
    by_target: dict[float, list[tuple[int, float]]] = {}
    for r in rows:
        by_target.setdefault(float(r["target_error"]), []).append((int(r["k"]), float(r["expected_qubits"])))
    out = {}
    for t, pts in by_target.items():
        floor = min(c for _, c in pts)
        ks = [k for k, c in pts if c <= (1 + slack) * floor]
        out[t] = (min(ks), max(ks))
    return out


def band_overlap_fraction(band: dict[float, tuple[int, int]], lo: int = 2, hi: int = 13) -> float:
    if not band:
        return 0.0
    return sum(1 for a, b in band.values() if a <= hi and b >= lo) / len(band)


def write_csv(rows: Sequence[dict], header: Sequence[str], dest: str | Path | io.TextIOBase) -> None:
    def emit(fh):
        w = csv.DictWriter(fh, fieldnames=list(header), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({h: (repr(v) if isinstance(v, float) else v) for h, v in r.items()})

    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            emit(fh)
    else:
        emit(dest)


def write_plot_data(
    out_dir: str | Path,
    p0: float = DEFAULT_P0,
    targets: Sequence[float] = DEFAULT_GRID,
    decade_tolerance: float = 0.5,
) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curve = cost_curves(p0, targets, decade_tolerance)
    f5, f6 = out / "fig5.csv", out / "fig6.csv"
    write_csv(fig5_rows(curve), FIG5_HEADER, f5)
    write_csv(fig6_rows(p0, targets, decade_tolerance=decade_tolerance), FIG6_HEADER, f6)
    return f5, f6
