"""Distillation analysis under i.i.d. Z noise after the transversal Toffoli.

Each block sees independent Z errors at rate ``p`` per qubit.  A round is
accepted iff every block has a trivial X-stabilizer syndrome; an accepted
block fails iff its error acts as a nontrivial logical operator.  Everything
here is discard-only: no decoding.
"""

from __future__ import annotations

import itertools
import json
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .codes import CssCode, TriorthogonalCode, as_css, builtin_15_1_3
from .gf2 import (
    DEFAULT_ENUM_LIMIT,
    BinaryVector,
    EnumerationLimitError,
    in_rowspace_mask,
    independent_rows,
    popcount,
    rowspace_contains,
    span_array,
    weight_enumerator,
)
from .transversality import HybridSystem

MAX_LEVELS = 32
THRESHOLD_BRACKET = (1e-6, 0.5)
THRESHOLD_TOL = 1e-6
MC_CHUNK = 1 << 16
RNG_ALGORITHM = "numpy PCG64"
RNG_SEEDING = "chunk i uses SeedSequence(seed, spawn_key=(i,)), chunks of 65536 trials"


class DistillError(ValueError):
    pass


class AboveThresholdError(DistillError):
    """Input error is not contracted by one more level."""


class LevelCapError(DistillError):
    pass


class DegenerateModelError(DistillError):
    """Every probability is a fixed point, so there is no threshold."""


class ValidityWindowError(DistillError):
    pass


@dataclass(frozen=True)
class ErrorModel:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DistillError(f"error rate {self.p} outside [0, 1]")


# syndromes ------------------------------------------------------------------


def _bits(q: CssCode, e: BinaryVector | int | str) -> int:
    if isinstance(e, str):
        e = BinaryVector.from_str(e)
    if isinstance(e, BinaryVector):
        if len(e) != q.n:
            raise DistillError(f"error length {len(e)} does not match block length {q.n}")
        return e.bits
    if e >> q.n:
        raise DistillError("error vector has bits beyond the block length")
    return int(e)


def z_syndrome(q: CssCode | TriorthogonalCode, e: BinaryVector | int | str) -> BinaryVector:
    """Parities of ``e`` with an independent basis of the X-stabilizers."""
    q = as_css(q)
    bits = _bits(q, e)
    checks = independent_rows(q.x_stab)
    s = sum(((row & bits).bit_count() & 1) << i for i, row in enumerate(checks.rows))
    return BinaryVector(s, checks.nrows)


def is_logical_z(q: CssCode | TriorthogonalCode, e: BinaryVector | int | str) -> bool:
    q = as_css(q)
    bits = _bits(q, e)
    if z_syndrome(q, bits).bits:
        raise DistillError("error has a nonzero syndrome; it would be discarded")
    return not rowspace_contains(q.z_stab, bits)


def count_undetectable(q: CssCode | TriorthogonalCode, w: int, limit: int = DEFAULT_ENUM_LIMIT) -> tuple[int, int]:
    """(weight-``w`` errors with trivial syndrome, those that act logically).

    Walks whichever is smaller: the C(n, w) patterns or the trivial-syndrome
    space C2.
    """
    q = as_css(q)
    n = q.n
    if not 0 <= w <= n:
        return 0, 0
    c2 = independent_rows(q.c2.gen)
    n_patterns = math.comb(n, w)
    if c2.nrows <= limit and 2**c2.nrows <= n_patterns:
        span = span_array(c2, limit)
        hits = span[popcount(span) == w]
        total = len(hits)
        logical = int((~in_rowspace_mask(hits, q.z_stab)).sum())
        return total, logical
    if n_patterns > 1 << (2 * limit):
        raise EnumerationLimitError(min(c2.nrows, n), limit)
    checks = q.x_stab.rows
    total = logical = 0
    for combo in itertools.combinations(range(n), w):
        e = sum(1 << j for j in combo)
        if any((row & e).bit_count() & 1 for row in checks):
            continue
        total += 1
        logical += not rowspace_contains(q.z_stab, e)
    return total, logical


# exact polynomials -------------------------------------------------------------


@dataclass(frozen=True)
class BlockAnalysis:
    """Weight counts of accepted errors and of accepted-but-logical errors."""

    accept_poly_coeffs: tuple[int, ...]
    fail_poly_coeffs: tuple[int, ...]
    n: int

    def __post_init__(self):
        a, f = self.accept_poly_coeffs, self.fail_poly_coeffs
        if len(a) != self.n + 1 or len(f) != self.n + 1:
            raise DistillError("coefficient lists must have n + 1 entries")
        if a[0] != 1 or f[0] != 0:
            raise DistillError("need accept[0] = 1 and fail[0] = 0")
        if any(x < y or y < 0 for x, y in zip(a, f)):
            raise DistillError("fail counts must lie between 0 and the accept counts")

    def accept(self, p: float) -> float:
        return exact_accept_prob(self, p)

    def output_error(self, p: float) -> float:
        return exact_output_error(self, p)

    def accept_series(self) -> list[int]:
        return _power_basis(self.accept_poly_coeffs, self.n)

    def fail_series(self) -> list[int]:
        return _power_basis(self.fail_poly_coeffs, self.n)


def analyze_block(q: CssCode | TriorthogonalCode, limit: int = DEFAULT_ENUM_LIMIT) -> BlockAnalysis:
    q = as_css(q)
    accept = weight_enumerator(q.c2.gen, limit)
    stab = weight_enumerator(q.z_stab, limit) if q.z_stab.nrows else [1] + [0] * q.n
    fail = [a - s for a, s in zip(accept, stab)]
    return BlockAnalysis(tuple(accept), tuple(fail), q.n)


def _power_basis(coeffs: Sequence[int], n: int) -> list[int]:
    """Integer coefficients of ``sum_w c_w p^w (1-p)^(n-w)`` in powers of p."""
    out = [0] * (n + 1)
    for w, c in enumerate(coeffs):
        if c:
            for i in range(n - w + 1):
                out[w + i] += c * (-1) ** i * math.comb(n - w, i)
    return out


def _evaluate(coeffs: Sequence[int], n: int, p: float) -> float:
    if p == 0.0:
        return float(coeffs[0])
    return math.fsum(c * p**w * (1 - p) ** (n - w) for w, c in enumerate(coeffs) if c)


def exact_accept_prob(b: BlockAnalysis, p: float) -> float:
    return _evaluate(b.accept_poly_coeffs, b.n, p)


def exact_output_error(b: BlockAnalysis, p: float) -> float:
    """Probability of a logical error given acceptance."""
    if p >= 1:
        raise DistillError("output error needs p < 1")
    return _evaluate(b.fail_poly_coeffs, b.n, p) / _evaluate(b.accept_poly_coeffs, b.n, p)


@dataclass(frozen=True)
class TruncatedModel:
    """Leading-order map ``p -> coeff p^power``; acceptance ``(1-p)^n`` unless a
    full block analysis is supplied."""

    coeff: float = 35.0
    power: int = 3
    n: int = 15
    accept_from: BlockAnalysis | None = None

    def output_error(self, p: float) -> float:
        return self.coeff * p**self.power

    def accept(self, p: float) -> float:
        if self.accept_from is not None:
            return exact_accept_prob(self.accept_from, p)
        return (1 - p) ** self.n


@dataclass(frozen=True)
class HybridAnalysis:
    """Three blocks of one distillation round.

    ``accept`` is the probability that all three blocks pass.  ``error_mode``
    selects what is carried to the next level: ``"worst_block"`` (largest
    per-block logical error, the per-block figure the cost formulas use) or
    ``"any_block"`` (probability that at least one block fails).
    """

    blocks: tuple[BlockAnalysis, BlockAnalysis, BlockAnalysis]
    error_mode: str = "worst_block"

    @classmethod
    def from_system(cls, sys: HybridSystem, error_mode: str = "worst_block") -> HybridAnalysis:
        return cls(tuple(analyze_block(b) for b in sys.blocks), error_mode)

    def accept(self, p: float) -> float:
        return math.prod(exact_accept_prob(b, p) for b in self.blocks)

    def block_errors(self, p: float) -> list[float]:
        return [exact_output_error(b, p) for b in self.blocks]

    def output_error(self, p: float) -> float:
        errs = self.block_errors(p)
        if self.error_mode == "worst_block":
            return max(errs)
        if self.error_mode == "any_block":
            return 1 - math.prod(1 - e for e in errs)
        raise DistillError(f"unknown error mode {self.error_mode!r}")


def builtin_hybrid_analysis(error_mode: str = "worst_block") -> HybridAnalysis:
    return HybridAnalysis.from_system(HybridSystem.from_triorthogonal(builtin_15_1_3()), error_mode)


# thresholds ------------------------------------------------------------------------


def _error_map(model) -> Callable[[float], float]:
    if isinstance(model, BlockAnalysis):
        return lambda p: exact_output_error(model, p)
    if hasattr(model, "output_error"):
        return model.output_error
    if callable(model):
        return model
    raise DistillError(f"cannot read an error map from {type(model).__name__}")


def find_threshold(model, bracket: tuple[float, float] = THRESHOLD_BRACKET, tol: float = THRESHOLD_TOL) -> float:
    """Smallest fixed point ``f(p) = p`` in ``bracket``, by grid scan then bisection.

    ``model`` is a BlockAnalysis, anything with ``output_error`` or a plain
    callable.
    """
    f = _error_map(model)
    lo, hi = bracket
    grid = np.linspace(lo, hi, 1001)
    gaps = np.array([f(float(p)) - float(p) for p in grid])
    scale = np.maximum(grid, 1e-300)
    if np.all(np.abs(gaps) <= 1e-12 * scale):
        raise DegenerateModelError("every probability is a fixed point; there is no threshold")
    if gaps[0] >= 0:
        raise DistillError("the error map does not contract near zero")
    up = np.flatnonzero(gaps >= 0)
    if up.size == 0:
        raise DistillError(f"no fixed point in ({lo}, {hi})")
    a, b = float(grid[up[0] - 1]), float(grid[up[0]])
    while b - a > tol:
        mid = 0.5 * (a + b)
        if f(mid) - mid < 0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def toffoli_threshold(p_eps: float) -> float:
    """Toffoli-gate error threshold from a state threshold: ``3 p (1-p)^2``."""
    if not 0 <= p_eps <= 1:
        raise DistillError("p_eps must be a probability")
    return 3 * p_eps * (1 - p_eps) ** 2


# [[3k+8, k, 2]] rate formulas -----------------------------------------------------


def family_3k8(k: int, p: float) -> dict[str, float]:
    """Leading-order acceptance and per-qubit output error of the family."""
    if k < 1:
        raise DistillError("k must be at least 1")
    if not 0 <= p or (3 * k + 8) * p >= 1:
        raise ValidityWindowError(
            f"(3k+8) p = {(3 * k + 8) * p:.3g} is outside the linearized window; use a smaller p "
            "or supply an explicit generator matrix for an exact analysis"
        )
    return {"accept": max(0.0, 1 - (3 * k + 8) * p), "output_error": (1 + 3 * k) * p**2}


@dataclass(frozen=True)
class Family3k8:
    k: int

    @property
    def n(self) -> int:
        return 3 * self.k + 8

    def accept(self, p: float) -> float:
        return family_3k8(self.k, p)["accept"]

    def output_error(self, p: float) -> float:
        return family_3k8(self.k, p)["output_error"]

    def block_accept(self, p: float) -> float:
        return self.accept(p)


# level iteration ----------------------------------------------------------------


@dataclass(frozen=True)
class LevelTrace:
    level: int
    p_in: float
    p_out: float
    accept_prob: float


def target_met(p: float, target: float, decade_tolerance: float = 0.5) -> bool:
    """``p`` reaches ``target`` to within ``decade_tolerance`` decades.

    With tolerance 0 this is plain ``p <= target``.  The default half decade
    reads targets as orders of magnitude, which is how the two-level
    15-to-1 schedule (about 1.5e-12) meets a 1e-12 target.
    """
    if p <= target:
        return True
    if p <= 0 or target <= 0:
        return False
    return math.log10(p) < math.log10(target) + decade_tolerance


def iterate_levels(
    p0: float,
    target: float,
    code,
    decade_tolerance: float = 0.5,
    max_levels: int = MAX_LEVELS,
) -> list[LevelTrace]:
    """Apply the level map until ``target`` is met.

    ``code`` is a BlockAnalysis, HybridAnalysis, TruncatedModel, Family3k8 or
    a sequence of per-level models (for a schedule).  The recorded accept
    probability is the model's ``accept`` at that level's input rate.
    """
    if not 0 <= p0 <= 1 or not 0 < target <= 1:
        raise DistillError("p0 and target must be probabilities (target > 0)")
    schedule = list(code) if isinstance(code, (list, tuple)) else None
    out: list[LevelTrace] = []
    p = p0
    while not target_met(p, target, decade_tolerance):
        m = len(out) + 1
        if m > max_levels or (schedule is not None and m > len(schedule)):
            raise LevelCapError(f"target {target} not reached after {m - 1} levels")
        model = schedule[m - 1] if schedule is not None else code
        nxt = _error_map(model)(p)
        if nxt >= p:
            raise AboveThresholdError(f"p = {p:.4g} is not below the threshold: next level gives {nxt:.4g}")
        accept = exact_accept_prob(model, p) if isinstance(model, BlockAnalysis) else model.accept(p)
        out.append(LevelTrace(m, p, nxt, accept))
        p = nxt
    return out


# reports ------------------------------------------------------------------------------


@dataclass
class DistillationReport:
    mode: str
    p: float
    accept_prob: float
    output_error_per_block: list[float]
    combined_output_error: float
    trials: int | None = None
    seed: int | None = None
    std_error: dict | None = None
    accepted: int | None = None
    rng: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _blocks_of(sys) -> list[CssCode]:
    if isinstance(sys, HybridSystem):
        return list(sys.blocks)
    if isinstance(sys, (CssCode, TriorthogonalCode)):
        return [as_css(sys)]
    return [as_css(b) for b in sys]


def exact_report(sys, model: ErrorModel | float) -> DistillationReport:
    p = model.p if isinstance(model, ErrorModel) else float(ErrorModel(model).p)
    analyses = [analyze_block(b) for b in _blocks_of(sys)]
    accept = math.prod(exact_accept_prob(a, p) for a in analyses)
    errs = [exact_output_error(a, p) for a in analyses]
    # blocks are independent and acceptance factorizes, so failures given
    # acceptance stay independent
    combined = 1 - math.prod(1 - e for e in errs)
    return DistillationReport("exact", p, accept, errs, combined)


def _mc_chunk(args) -> np.ndarray:
    """Counts for one chunk: [accepted, fail_block_0.., any_fail]."""
    chunk, size, seed, p, checks, logicals, n, nb = args
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(chunk,))))
    errs = (rng.random((size, nb, n)) < p).astype(np.int32)
    ok = np.ones(size, dtype=bool)
    bad = np.zeros((size, nb), dtype=bool)
    for b in range(nb):
        if checks[b].shape[0]:
            ok &= ~((errs[:, b, :] @ checks[b].T) & 1).any(axis=1)
        bad[:, b] = ((errs[:, b, :] @ logicals[b].T) & 1).any(axis=1)
    bad = bad[ok]
    return np.concatenate([[ok.sum()], bad.sum(axis=0), [bad.any(axis=1).sum()]]).astype(np.int64)


def monte_carlo(sys, model: ErrorModel | float, trials: int, seed: int, workers: int = 1) -> DistillationReport:
    """Sample Z errors on every block, post-select on trivial syndromes and
    count logical failures among accepted rounds.

    Trials are split into fixed chunks with their own substreams, so the
    report depends only on (seed, trials, p), not on ``workers``.
    """
    if trials < 1:
        raise DistillError("trials must be at least 1")
    p = model.p if isinstance(model, ErrorModel) else ErrorModel(model).p
    blocks = _blocks_of(sys)
    n = blocks[0].n
    checks = [b.x_stab.to_array().astype(np.int32) for b in blocks]
    # an accepted Z error is logical iff it pairs oddly with some logical X rep
    logicals = [b.map_a.to_array().astype(np.int32) for b in blocks]
    jobs = []
    for chunk, start in enumerate(range(0, trials, MC_CHUNK)):
        size = min(MC_CHUNK, trials - start)
        jobs.append((chunk, size, seed, p, checks, logicals, n, len(blocks)))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_mc_chunk, jobs))
    else:
        parts = [_mc_chunk(j) for j in jobs]
    totals = np.sum(parts, axis=0)
    acc = int(totals[0])
    accept = acc / trials
    per_block = [float(x) / acc if acc else 0.0 for x in totals[1:-1]]
    combined = float(totals[-1]) / acc if acc else 0.0

    def se(rate, count):
        return math.sqrt(rate * (1 - rate) / count) if count else float("nan")

    std = {
        "accept_prob": se(accept, trials),
        "output_error_per_block": [se(r, acc) for r in per_block],
        "combined_output_error": se(combined, acc),
    }
    rng = {"algorithm": RNG_ALGORITHM, "seeding": RNG_SEEDING}
    return DistillationReport("monte_carlo", p, accept, per_block, combined, trials, seed, std, acc, rng)


__all__ = [
    "AboveThresholdError",
    "BlockAnalysis",
    "DegenerateModelError",
    "DistillError",
    "DistillationReport",
    "ErrorModel",
    "Family3k8",
    "HybridAnalysis",
    "LevelCapError",
    "LevelTrace",
    "TruncatedModel",
    "ValidityWindowError",
    "analyze_block",
    "builtin_hybrid_analysis",
    "count_undetectable",
    "exact_accept_prob",
    "exact_output_error",
    "exact_report",
    "family_3k8",
    "find_threshold",
    "is_logical_z",
    "iterate_levels",
    "monte_carlo",
    "target_met",
    "toffoli_threshold",
    "z_syndrome",
]
