"""Classical, CSS, triorthogonal and mirrored codes.

Stabilizer convention: X-type stabilizers generate C2-perp and Z-type
stabilizers generate C1-perp, so a triorthogonal code ``[G1; G0]`` has
X-stabilizers ``G0`` and Z-stabilizers ``G``-perp.  Logical computational
basis states are coset sums ``|psi A + y>`` over ``y`` in C2-perp, with
``A`` the mapping matrix (one row per logical qubit).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .gf2 import (
    DEFAULT_ENUM_LIMIT,
    BinaryMatrix,
    EnumerationLimitError,
    GF2Error,
    first_outside,
    in_rowspace_mask,
    independent_rows,
    invert,
    is_subspace,
    nullspace,
    popcount,
    quotient_basis,
    rank,
    same_rowspace,
    span_array,
)


class CodeConstructionError(ValueError):
    """Inputs do not define a valid code."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class ClassicalCode:
    """Binary linear code given by a full-row-rank generator."""

    gen: BinaryMatrix

    def __post_init__(self):
        if rank(self.gen) != self.gen.nrows:
            raise CodeConstructionError("generator must have full row rank")

    @classmethod
    def spanned_by(cls, m: BinaryMatrix) -> ClassicalCode:
        """Code spanned by ``m``, dropping dependent rows (input order kept)."""
        return cls(independent_rows(m))

    @property
    def n(self) -> int:
        return self.gen.cols

    @property
    def k_classical(self) -> int:
        return self.gen.nrows


@dataclass(frozen=True)
class CssCode:
    n: int
    k: int
    c1: ClassicalCode
    c2: ClassicalCode
    x_stab: BinaryMatrix  # generates C2-perp
    z_stab: BinaryMatrix  # generates C1-perp
    map_a: BinaryMatrix  # k x n, representatives of C1 / C2-perp

    def logical_rep(self, psi: int | tuple[int, ...]) -> int:
        """``x_psi = psi A`` as an int bitset; ``psi`` is a bit tuple or an int
        whose bit ``i`` is logical qubit ``i``."""
        if isinstance(psi, tuple):
            psi = sum(b << i for i, b in enumerate(psi))
        return self.map_a.combine(psi)

    def describe(self, distance: int | None = None) -> dict:
        out = {"n": self.n, "k": self.k}
        if distance is not None:
            out["distance"] = distance
        out["x_stab"] = self.x_stab.to_strings()
        out["z_stab"] = self.z_stab.to_strings()
        out["map_a"] = self.map_a.to_strings()
        return out

    def to_json(self, distance: int | None = None) -> str:
        return json.dumps(self.describe(distance))


@dataclass(frozen=True)
class TriReport:
    is_triorthogonal: bool
    pair_violations: list[tuple[int, int]] = field(default_factory=list)
    triple_violations: list[tuple[int, int, int]] = field(default_factory=list)
    odd_rows: list[int] = field(default_factory=list)
    even_rows: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "is_triorthogonal": self.is_triorthogonal,
            "pair_violations": [list(t) for t in self.pair_violations],
            "triple_violations": [list(t) for t in self.triple_violations],
            "odd_rows": self.odd_rows,
            "even_rows": self.even_rows,
        }


class NotTriorthogonalError(CodeConstructionError):
    def __init__(self, report: TriReport):
        super().__init__(
            f"matrix is not triorthogonal: {len(report.pair_violations)} pair and "
            f"{len(report.triple_violations)} triple violations",
            witness=report,
        )
        self.report = report


@dataclass(frozen=True)
class TriorthogonalCode:
    base: CssCode
    g1: BinaryMatrix
    g0: BinaryMatrix

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def generator(self) -> BinaryMatrix:
        return self.g1.vstack(self.g0)


def as_css(q: CssCode | TriorthogonalCode) -> CssCode:
    return q.base if isinstance(q, TriorthogonalCode) else q


def check_triorthogonal(g: BinaryMatrix) -> TriReport:
    """Exhaustive pair and triple overlap test; violations in lexicographic order."""
    rows = g.rows
    m = len(rows)
    pairs = [(a, b) for a, b in itertools.combinations(range(m), 2) if (rows[a] & rows[b]).bit_count() & 1]
    triples = [
        (a, b, c) for a, b, c in itertools.combinations(range(m), 3) if (rows[a] & rows[b] & rows[c]).bit_count() & 1
    ]
    odd = [i for i, r in enumerate(rows) if r.bit_count() & 1]
    even = [i for i, r in enumerate(rows) if not r.bit_count() & 1]
    return TriReport(not pairs and not triples, pairs, triples, odd, even)


def build_css(c1: ClassicalCode, c2: ClassicalCode) -> CssCode:
    if c1.n != c2.n:
        raise CodeConstructionError(f"block length mismatch: {c1.n} != {c2.n}")
    x_stab = nullspace(c2.gen)
    bad = first_outside(x_stab, c1.gen)
    if bad is not None:
        witness = x_stab.row(bad)
        raise CodeConstructionError(f"C2-perp is not contained in C1: {witness} lies outside C1", witness)
    z_stab = nullspace(c1.gen)
    map_a = quotient_basis(c1.gen, x_stab)
    k = c1.k_classical + c2.k_classical - c1.n
    return CssCode(c1.n, k, c1, c2, x_stab, z_stab, map_a)


def build_triorthogonal(g: BinaryMatrix) -> TriorthogonalCode:
    """CSS code with C1 = rowspace(G) and C2 = G0-perp; logical qubits follow
    the odd-weight rows of ``g`` in input order."""
    report = check_triorthogonal(g)
    if not report.is_triorthogonal:
        raise NotTriorthogonalError(report)
    g1 = BinaryMatrix(tuple(g.rows[i] for i in report.odd_rows), g.cols)
    g0 = BinaryMatrix(tuple(g.rows[i] for i in report.even_rows), g.cols)
    if g1.nrows == 0:
        raise CodeConstructionError("no odd-weight rows: the code encodes k = 0 qubits")
    if rank(g1.vstack(g0)) != g.nrows:
        raise CodeConstructionError("triorthogonal matrix must have full row rank")
    c1 = ClassicalCode(g1.vstack(g0))
    c2 = ClassicalCode(nullspace(g0))
    base = CssCode(
        n=g.cols,
        k=g1.nrows,
        c1=c1,
        c2=c2,
        x_stab=g0,
        z_stab=nullspace(c1.gen),
        map_a=g1,
    )
    return TriorthogonalCode(base, g1, g0)


def _dual_map(a: BinaryMatrix, c2_gen: BinaryMatrix, c1perp: BinaryMatrix) -> BinaryMatrix:
    """Representatives ``B`` of C2 / C1-perp with ``A B^T = I``.

    The pairing between C1/C2-perp and C2/C1-perp is non-degenerate, so the
    dual basis exists and is unique modulo C1-perp.
    """
    q = quotient_basis(c2_gen, c1perp)
    if q.nrows == 0:
        return q
    m = a.gram(q)
    r = invert(m)
    # B = (M^-1)^T Q  so that A B^T = M (M^-1) = I
    rows = []
    for i in range(q.nrows):
        coeffs = sum(r[j][i] << j for j in range(q.nrows))
        rows.append(q.combine(coeffs))
    return BinaryMatrix(tuple(rows), a.cols)


def mirror(q: CssCode | TriorthogonalCode) -> CssCode:
    """CSS(C2, C1): X and Z stabilizers exchanged.

    The mapping matrix of the result is the dual basis of ``q.map_a``, which
    makes transversal Hadamard act as logical Hadamard on every qubit and
    makes ``mirror`` an involution on logical labels as well as stabilizers.
    """
    q = as_css(q)
    map_b = _dual_map(q.map_a, q.c2.gen, q.z_stab)
    return CssCode(q.n, q.k, q.c2, q.c1, q.z_stab, q.x_stab, map_b)


def same_code(a: CssCode, b: CssCode) -> bool:
    """Equal stabilizer spaces and equal logical labelling (row-space level)."""
    a, b = as_css(a), as_css(b)
    if a.n != b.n or a.k != b.k:
        return False
    if not (same_rowspace(a.x_stab, b.x_stab) and same_rowspace(a.z_stab, b.z_stab)):
        return False
    red = a.x_stab
    return all(is_subspace(BinaryMatrix((ra ^ rb,), a.n), red) for ra, rb in zip(a.map_a.rows, b.map_a.rows))


def builtin_15_1_3() -> TriorthogonalCode:
    """The [[15,1,3]] code from the punctured first-order Reed-Muller matrix.

    Row 0 is all-ones; row ``i+1`` has bit ``j`` set iff bit ``i`` of the label
    ``j+1`` is set.
    """
    n = 15
    g1 = (1 << n) - 1
    g0 = tuple(sum(1 << j for j in range(n) if (j + 1) >> i & 1) for i in range(4))
    code = build_triorthogonal(BinaryMatrix((g1,) + g0, n))
    assert code.n == 15 and code.k == 1
    return code


def _min_weight_outside(c: BinaryMatrix, sub: BinaryMatrix, limit: int) -> int | None:
    span = span_array(independent_rows(c), limit)
    inside = in_rowspace_mask(span, sub)
    weights = popcount(span)
    outside = weights[~inside]
    return int(outside.min()) if outside.size else None


def code_distance(q: CssCode | TriorthogonalCode, limit: int = DEFAULT_ENUM_LIMIT) -> int:
    """min weight over C1 \\ C2-perp and C2 \\ C1-perp, by brute force."""
    q = as_css(q)
    for c in (q.c1, q.c2):
        if c.k_classical > limit:
            raise EnumerationLimitError(c.k_classical, limit)
    dx = _min_weight_outside(q.c1.gen, q.x_stab, limit)
    dz = _min_weight_outside(q.c2.gen, q.z_stab, limit)
    candidates = [d for d in (dx, dz) if d is not None]
    if not candidates:
        raise GF2Error("code has no logical operators")
    return min(candidates)


def side_distances(q: CssCode | TriorthogonalCode, limit: int = DEFAULT_ENUM_LIMIT) -> tuple[int | None, int | None]:
    """(min weight in C1 \\ C2-perp, min weight in C2 \\ C1-perp)."""
    q = as_css(q)
    return (
        _min_weight_outside(q.c1.gen, q.x_stab, limit),
        _min_weight_outside(q.c2.gen, q.z_stab, limit),
    )


def stabilizers_commute(q: CssCode) -> bool:
    return not any(any(row) for row in q.x_stab.gram(q.z_stab))
