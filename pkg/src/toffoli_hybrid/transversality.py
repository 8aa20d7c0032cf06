"""Transversal-gate conditions and exact coset verification.

Algebraic checks (``check_*``) test subspace conditions on the classical
codes.  Verifiers (``verify_*``) expand every logical basis state as its
coset sum and test what the physical gate does to each term, so they are an
independent ground truth for the algebraic checks.

All sweeps run in a fixed order (logical labels lexicographically, then coset
elements in binary-counting order over the X-stabilizer rows) and stop at the
first violation, which is reported as the witness.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .codes import CssCode, TriorthogonalCode, as_css, mirror, same_code
from .gf2 import (
    DEFAULT_ENUM_LIMIT,
    EnumerationLimitError,
    _int_to_str,
    first_outside,
    independent_rows,
    nullspace,
    pack,
    parity_with,
    popcount,
    rowspace_contains,
    span_array,
    unpack_row,
)


class TransversalityError(ValueError):
    """Operands violate a precondition (shape, relation between codes)."""


@dataclass(frozen=True)
class TransversalityVerdict:
    gate: str
    holds: bool
    checks_performed: int = 0
    witness: dict | None = None
    induced_sign: int | None = None
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"gate": self.gate, "holds": self.holds}
        if self.induced_sign is not None:
            out["induced_sign"] = self.induced_sign
        if self.witness is not None:
            out["witness"] = self.witness
        out["checks_performed"] = self.checks_performed
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict())

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class HybridSystem:
    """Two control blocks and a target block for transversal Toffoli."""

    block1: CssCode
    block2: CssCode
    block3: CssCode

    def __post_init__(self):
        blocks = [as_css(b) for b in (self.block1, self.block2, self.block3)]
        object.__setattr__(self, "block1", blocks[0])
        object.__setattr__(self, "block2", blocks[1])
        object.__setattr__(self, "block3", blocks[2])
        if len({b.n for b in blocks}) != 1 or len({b.k for b in blocks}) != 1:
            raise TransversalityError("all blocks must share n and k")

    @classmethod
    def from_triorthogonal(cls, q: TriorthogonalCode | CssCode) -> HybridSystem:
        """(Q, Q, mirror(Q))."""
        return cls(q, q, mirror(q))

    @property
    def blocks(self) -> tuple[CssCode, CssCode, CssCode]:
        return (self.block1, self.block2, self.block3)

    @property
    def n(self) -> int:
        return self.block1.n

    @property
    def k(self) -> int:
        return self.block1.k


def _same_n(*codes: CssCode) -> None:
    if len({c.n for c in codes}) != 1:
        raise TransversalityError("block-length mismatch: " + ", ".join(str(c.n) for c in codes))


def _labels(k: int):
    """Logical labels in lexicographic order as (tuple, int) pairs."""
    for bits in itertools.product((0, 1), repeat=k):
        yield bits, sum(b << i for i, b in enumerate(bits))


def _bits(value: int, n: int) -> str:
    return _int_to_str(value, n)


def _coset_space(q: CssCode, limit: int) -> np.ndarray:
    basis = independent_rows(q.x_stab)
    if basis.nrows > limit:
        raise EnumerationLimitError(basis.nrows, limit)
    return span_array(basis, limit)


# algebraic conditions ------------------------------------------------------


def check_cnot_condition(qa: CssCode, qb: CssCode) -> TransversalityVerdict:
    """CNOT from ``qa`` (control) to ``qb`` (target).

    Requires C2a-perp within C4b-perp and, with row ``i`` of each mapping
    matrix paired, ``A_a[i] = A_b[i]`` modulo C4b-perp.  Together these make the
    quotients C1a/C2a-perp and C3b/C4b-perp isomorphic through the pairing.
    """
    qa, qb = as_css(qa), as_css(qb)
    _same_n(qa, qb)
    checks = 0
    if qa.k != qb.k:
        return TransversalityVerdict("cnot", False, checks, {"clause": "k_mismatch", "k": [qa.k, qb.k]})
    bad = first_outside(qa.x_stab, qb.x_stab)
    checks += qa.x_stab.nrows if bad is None else bad + 1
    if bad is not None:
        return TransversalityVerdict(
            "cnot",
            False,
            checks,
            {"clause": "x_stab_containment", "row": bad, "vector": _bits(qa.x_stab.rows[bad], qa.n)},
        )
    for i, (ra, rb) in enumerate(zip(qa.map_a.rows, qb.map_a.rows)):
        checks += 1
        if not rowspace_contains(qb.x_stab, ra ^ rb):
            return TransversalityVerdict(
                "cnot",
                False,
                checks,
                {"clause": "quotient_alignment", "logical": i, "difference": _bits(ra ^ rb, qa.n)},
            )
    return TransversalityVerdict("cnot", True, checks)


def check_cz_condition(qa: CssCode, qb: CssCode) -> TransversalityVerdict:
    """Sufficient condition for transversal CZ between CSS(C1,C2) and CSS(C3,C4):
    C1/C2-perp within C4, C3 within C2, and A B^T = I."""
    qa, qb = as_css(qa), as_css(qb)
    _same_n(qa, qb)
    if qa.k != qb.k:
        return TransversalityVerdict("cz", False, 0, {"clause": "k_mismatch", "k": [qa.k, qb.k]})
    checks = 0
    bad = first_outside(qa.map_a, qb.c2.gen)
    checks += qa.k if bad is None else bad + 1
    if bad is not None:
        return TransversalityVerdict(
            "cz", False, checks, {"clause": "map_in_c4", "row": bad, "vector": _bits(qa.map_a.rows[bad], qa.n)}
        )
    bad = first_outside(qb.c1.gen, qa.c2.gen)
    checks += qb.c1.k_classical if bad is None else bad + 1
    if bad is not None:
        return TransversalityVerdict(
            "cz", False, checks, {"clause": "c3_in_c2", "row": bad, "vector": _bits(qb.c1.gen.rows[bad], qa.n)}
        )
    gram = qa.map_a.gram(qb.map_a)
    checks += 1
    identity = [[int(i == j) for j in range(qa.k)] for i in range(qa.k)]
    if gram != identity:
        return TransversalityVerdict("cz", False, checks, {"clause": "pairing", "product": gram})
    return TransversalityVerdict("cz", True, checks, details={"product": gram})


# coset verifiers ----------------------------------------------------------------


def verify_cnot_coset(qa: CssCode, qb: CssCode, limit: int = DEFAULT_ENUM_LIMIT) -> TransversalityVerdict:
    """Expand the control's coset sum and check each CNOT image term.

    Transversal CNOT sends ``|x_a + y_a>|x_b + y_b>`` to
    ``|x_a + y_a>|x_a + y_a + x_b + y_b>``.  The target sum over ``y_b`` is
    coset invariant, so it is correct iff for every ``psi_a, psi_b, y_a`` the
    vector ``x_a + y_a + x_b`` lies in the coset of ``x'_{psi_a xor psi_b}``
    modulo C4-perp.
    """
    qa, qb = as_css(qa), as_css(qb)
    _same_n(qa, qb)
    if qa.k != qb.k:
        return TransversalityVerdict("cnot", False, 0, {"clause": "k_mismatch"})
    span_a = _coset_space(qa, limit)
    checks_matrix = nullspace(qb.x_stab)
    count = 0
    for bits_a, pa in _labels(qa.k):
        xa = qa.logical_rep(pa)
        for bits_b, pb in _labels(qb.k):
            xb = qb.logical_rep(pb)
            expect = qb.logical_rep(pa ^ pb)
            diff = pack([xa ^ xb ^ expect], qa.n)[0]
            vecs = span_a ^ diff
            bad = parity_with(vecs, checks_matrix).any(axis=-1) if checks_matrix.nrows else np.zeros(len(vecs), bool)
            hits = np.flatnonzero(bad)
            if hits.size:
                j = int(hits[0])
                count += j + 1
                ya = unpack_row(span_a[j])
                return TransversalityVerdict(
                    "cnot",
                    False,
                    count,
                    {
                        "psi_a": list(bits_a),
                        "psi_b": list(bits_b),
                        "y_a": _bits(ya, qa.n),
                        "target_vector": _bits(xa ^ ya ^ xb, qa.n),
                        "expected_rep": _bits(expect, qa.n),
                    },
                )
            count += len(vecs)
    return TransversalityVerdict("cnot", True, count)


def verify_cz_phase(qa: CssCode, qb: CssCode, limit: int = DEFAULT_ENUM_LIMIT) -> TransversalityVerdict:
    """Transversal CZ puts ``(-1)^{u.v}`` on ``|u>|v>``; logical CZ needs
    ``u.v = psi_a . psi_b`` (mod 2) for every pair of coset elements."""
    qa, qb = as_css(qa), as_css(qb)
    _same_n(qa, qb)
    if qa.k != qb.k:
        return TransversalityVerdict("cz", False, 0, {"clause": "k_mismatch"})
    span_a = _coset_space(qa, limit)
    span_b = _coset_space(qb, limit)
    if np.log2(len(span_a)) + np.log2(len(span_b)) > limit:
        raise EnumerationLimitError(int(np.log2(len(span_a)) + np.log2(len(span_b))), limit)
    count = 0
    for bits_a, pa in _labels(qa.k):
        u = span_a ^ pack([qa.logical_rep(pa)], qa.n)[0]
        for bits_b, pb in _labels(qb.k):
            v = span_b ^ pack([qb.logical_rep(pb)], qb.n)[0]
            want = sum(x & y for x, y in zip(bits_a, bits_b)) & 1
            phase = popcount(u[:, None, :] & v[None, :, :]) & 1
            hits = np.flatnonzero(phase.ravel() != want)
            if hits.size:
                j = int(hits[0])
                ia, ib = divmod(j, len(v))
                count += j + 1
                return TransversalityVerdict(
                    "cz",
                    False,
                    count,
                    {
                        "psi_a": list(bits_a),
                        "psi_b": list(bits_b),
                        "u": _bits(unpack_row(u[ia]), qa.n),
                        "v": _bits(unpack_row(v[ib]), qa.n),
                        "phase": int(phase.ravel()[j]),
                        "expected_phase": want,
                    },
                )
            count += phase.size
    return TransversalityVerdict("cz", True, count)


def verify_t_transversality(q: CssCode | TriorthogonalCode, limit: int = DEFAULT_ENUM_LIMIT) -> TransversalityVerdict:
    """Transversal T puts ``exp(i pi wt(v) / 4)`` on ``|v>``.

    Holds iff for every label ``psi`` the weight of ``x_psi + y`` is constant
    mod 8 over the coset and equals ``s |psi|`` mod 8 for a single sign ``s``:
    ``s = +1`` is logical T on every qubit, ``s = -1`` logical T-dagger.
    """
    q = as_css(q)
    span = _coset_space(q, limit)
    count = 0
    signs = {+1, -1}
    residues = {}
    for bits, p in _labels(q.k):
        x = q.logical_rep(p)
        weights = popcount(span ^ pack([x], q.n)[0]) % 8
        count += len(weights)
        first = int(weights[0])
        bad = np.flatnonzero(weights != first)
        if bad.size:
            j = int(bad[0])
            return TransversalityVerdict(
                "t",
                False,
                count - len(weights) + j + 1,
                {
                    "psi": list(bits),
                    "clause": "non_constant_weight",
                    "vectors": [_bits(x ^ unpack_row(span[0]), q.n), _bits(x ^ unpack_row(span[j]), q.n)],
                    "weights_mod8": [first, int(weights[j])],
                },
            )
        ones = sum(bits)
        allowed = {s for s in (+1, -1) if (s * ones - first) % 8 == 0}
        if not allowed or not allowed & signs:
            witness = {
                "psi": list(bits),
                "clause": "wrong_phase" if not allowed else "sign_conflict",
                "vector": _bits(x ^ unpack_row(span[0]), q.n),
                "weight_mod8": first,
            }
            if allowed:
                prev = next(b for b, r in residues.items() if not allowed & _signs_for(sum(b), r))
                witness["conflicting_psi"] = list(prev)
                witness["conflicting_vector"] = _bits(q.logical_rep(prev) ^ unpack_row(span[0]), q.n)
            return TransversalityVerdict("t", False, count, witness)
        signs &= allowed
        residues[bits] = first
    # all-zero label gives no information about the sign when k == 0
    sign = -1 if signs == {-1} else +1
    return TransversalityVerdict(
        "t",
        True,
        count,
        induced_sign=sign,
        details={"residues": {"".join(map(str, b)): r for b, r in residues.items()}},
    )


def _signs_for(ones: int, residue: int) -> set[int]:
    return {s for s in (+1, -1) if (s * ones - residue) % 8 == 0}


def verify_tx_transversality(
    q_mirror: CssCode, q_source: CssCode | TriorthogonalCode, limit: int = DEFAULT_ENUM_LIMIT
) -> TransversalityVerdict:
    """T_X = H T H on the mirror of ``q_source``.

    Transversal Hadamard carries the mirror onto the source (stabilizers and,
    with the dual-basis labelling of :func:`mirror`, logical operators), so
    transversal T_X on the mirror is logical T_X exactly when transversal T is
    logical T on the source.
    """
    if not same_code(as_css(q_mirror), mirror(q_source)):
        raise TransversalityError("first operand is not the mirror of the second")
    inner = verify_t_transversality(q_source, limit)
    details = {"reduction": "hadamard_conjugation", "source_verdict": inner.as_dict()}
    return TransversalityVerdict("tx", inner.holds, inner.checks_performed, inner.witness, inner.induced_sign, details)


def verify_toffoli_transversality(sys: HybridSystem, limit: int = DEFAULT_ENUM_LIMIT) -> TransversalityVerdict:
    """Transversal Toffoli maps ``|u>|v>|w>`` to ``|u>|v>|w + u*v>`` (``*`` is
    the bitwise AND).  Logical Toffoli needs, for every ``psi1, psi2`` and
    coset elements ``y1, y2``, ``(x1 + y1) * (x2 + y2)`` to lie in the coset
    of ``x3_{psi1 AND psi2}`` modulo the target's X-stabilizer space."""
    b1, b2, b3 = sys.blocks
    s1 = _coset_space(b1, limit)
    s2 = _coset_space(b2, limit)
    checks_matrix = nullspace(b3.x_stab)
    count = 0
    for bits1, p1 in _labels(b1.k):
        u = s1 ^ pack([b1.logical_rep(p1)], b1.n)[0]
        for bits2, p2 in _labels(b2.k):
            v = s2 ^ pack([b2.logical_rep(p2)], b2.n)[0]
            target = b3.logical_rep(p1 & p2)
            prod = (u[:, None, :] & v[None, :, :]) ^ pack([target], b3.n)[0]
            if checks_matrix.nrows:
                bad = parity_with(prod, checks_matrix).any(axis=-1).ravel()
            else:
                bad = np.zeros(prod.shape[0] * prod.shape[1], dtype=bool)
            hits = np.flatnonzero(bad)
            if hits.size:
                j = int(hits[0])
                i1, i2 = divmod(j, len(v))
                count += j + 1
                uu, vv = unpack_row(u[i1]), unpack_row(v[i2])
                return TransversalityVerdict(
                    "toffoli",
                    False,
                    count,
                    {
                        "psi1": list(bits1),
                        "psi2": list(bits2),
                        "y1": _bits(unpack_row(s1[i1]), b1.n),
                        "y2": _bits(unpack_row(s2[i2]), b2.n),
                        "product": _bits(uu & vv, b1.n),
                        "expected_rep": _bits(target, b1.n),
                    },
                )
            count += bad.size
    return TransversalityVerdict("toffoli", True, count)


def recheck_witness(verdict: TransversalityVerdict, *codes: CssCode) -> bool:
    """Re-evaluate a failing verdict's witness from scratch; True if the
    violation is reproduced.  ``codes`` are the operands of the original call
    (for ``toffoli`` pass the three blocks)."""
    w = verdict.witness
    if verdict.holds or w is None:
        return False
    codes = tuple(as_css(c) for c in codes)
    gate = verdict.gate

    def vec(s: str) -> int:
        return sum(1 << j for j, c in enumerate(s) if c == "1")

    def label(bits) -> int:
        return sum(b << i for i, b in enumerate(bits))

    if "clause" in w and gate in ("cnot", "cz") and "psi_a" not in w:
        return not (check_cnot_condition if gate == "cnot" else check_cz_condition)(*codes).holds
    if gate == "cnot":
        qa, qb = codes
        ya = vec(w["y_a"])
        if not rowspace_contains(qa.x_stab, ya):
            return False
        pa, pb = label(w["psi_a"]), label(w["psi_b"])
        t = qa.logical_rep(pa) ^ ya ^ qb.logical_rep(pb)
        return not rowspace_contains(qb.x_stab, t ^ qb.logical_rep(pa ^ pb))
    if gate == "cz":
        qa, qb = codes
        u, v = vec(w["u"]), vec(w["v"])
        pa, pb = label(w["psi_a"]), label(w["psi_b"])
        if not rowspace_contains(qa.x_stab, u ^ qa.logical_rep(pa)):
            return False
        if not rowspace_contains(qb.x_stab, v ^ qb.logical_rep(pb)):
            return False
        want = (pa & pb).bit_count() & 1
        return (u & v).bit_count() & 1 != want
    if gate in ("t", "tx"):
        q = codes[-1] if gate == "tx" else codes[0]
        p = label(w["psi"])
        x = q.logical_rep(p)
        if w["clause"] == "non_constant_weight":
            a, b = (vec(s) for s in w["vectors"])
            same_coset = rowspace_contains(q.x_stab, a ^ x) and rowspace_contains(q.x_stab, b ^ x)
            return same_coset and (a.bit_count() - b.bit_count()) % 8 != 0
        a = vec(w["vector"])
        if not rowspace_contains(q.x_stab, a ^ x):
            return False
        allowed = _signs_for(sum(w["psi"]), a.bit_count() % 8)
        if w["clause"] == "wrong_phase":
            return not allowed
        b = vec(w["conflicting_vector"])
        if not rowspace_contains(q.x_stab, b ^ q.logical_rep(label(w["conflicting_psi"]))):
            return False
        return not allowed & _signs_for(sum(w["conflicting_psi"]), b.bit_count() % 8)
    if gate == "toffoli":
        b1, b2, b3 = codes
        y1, y2 = vec(w["y1"]), vec(w["y2"])
        if not (rowspace_contains(b1.x_stab, y1) and rowspace_contains(b2.x_stab, y2)):
            return False
        p1, p2 = label(w["psi1"]), label(w["psi2"])
        prod = (b1.logical_rep(p1) ^ y1) & (b2.logical_rep(p2) ^ y2)
        return not rowspace_contains(b3.x_stab, prod ^ b3.logical_rep(p1 & p2))
    raise TransversalityError(f"unknown gate {gate!r}")
