import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toffoli_hybrid.codes import ClassicalCode, CssCode, build_css, build_triorthogonal, mirror
from toffoli_hybrid.gf2 import BinaryMatrix, iter_span, nullspace, rank, rowspace_contains
from toffoli_hybrid.transversality import (
    HybridSystem,
    TransversalityError,
    check_cnot_condition,
    check_cz_condition,
    recheck_witness,
    verify_cnot_coset,
    verify_cz_phase,
    verify_t_transversality,
    verify_toffoli_transversality,
    verify_tx_transversality,
)

HAMMING7 = ["1101000", "0110100", "0011010", "0001101"]


def steane():
    h = ClassicalCode(BinaryMatrix.from_rows(HAMMING7))
    return build_css(h, h)


def three_qubit():
    return build_triorthogonal(BinaryMatrix.from_rows(["111"]))


# dense-state oracle for small codes ------------------------------------------------


def logical_state(q: CssCode, psi: int) -> np.ndarray:
    x = q.logical_rep(psi)
    vec = np.zeros(2**q.n)
    for y in set(iter_span(q.x_stab)):
        vec[x ^ y] += 1
    return vec / np.linalg.norm(vec)


def pair_state(qa, qb, pa, pb):
    return np.kron(logical_state(qa, pa), logical_state(qb, pb))


def transversal_cnot_ok(qa: CssCode, qb: CssCode) -> bool:
    n = qa.n
    for pa, pb in itertools.product(range(2**qa.k), repeat=2):
        psi = pair_state(qa, qb, pa, pb)
        out = np.zeros_like(psi)
        for idx in np.flatnonzero(psi):
            u, v = divmod(int(idx), 2**n)
            out[u * 2**n + (u ^ v)] += psi[idx]
        if not np.allclose(out, pair_state(qa, qb, pa, pa ^ pb)):
            return False
    return True


def transversal_cz_ok(qa: CssCode, qb: CssCode) -> bool:
    n = qa.n
    for pa, pb in itertools.product(range(2**qa.k), repeat=2):
        psi = pair_state(qa, qb, pa, pb)
        out = psi.copy()
        for idx in np.flatnonzero(psi):
            u, v = divmod(int(idx), 2**n)
            out[idx] *= (-1) ** ((u & v).bit_count())
        if not np.allclose(out, (-1) ** ((pa & pb).bit_count()) * psi):
            return False
    return True


@st.composite
def small_css(draw, max_n=4):
    n = draw(st.integers(2, max_n))
    rows = draw(st.lists(st.integers(1, 2**n - 1), min_size=1, max_size=n))
    c1 = ClassicalCode.spanned_by(BinaryMatrix(tuple(rows), n))
    coeffs = draw(st.lists(st.integers(0, 2**c1.k_classical - 1), max_size=c1.k_classical))
    sub = BinaryMatrix(tuple(c1.gen.combine(c) for c in coeffs), n)
    if rank(sub) == n:
        sub = BinaryMatrix.empty(n)
    q = build_css(c1, ClassicalCode(nullspace(sub)))
    if q.k == 0:
        q = build_css(ClassicalCode(BinaryMatrix.identity(n)), ClassicalCode(BinaryMatrix.identity(n)))
    return q


# CNOT -----------------------------------------------------------------------------------


def test_cnot_self(builtin, mirrored):
    for q in (builtin.base, mirrored, steane(), three_qubit().base):
        assert check_cnot_condition(q, q).holds
        assert verify_cnot_coset(q, q).holds


def test_cnot_directional(builtin, mirrored):
    fwd = check_cnot_condition(builtin, mirrored)
    assert fwd.holds and verify_cnot_coset(builtin, mirrored).holds
    rev = check_cnot_condition(mirrored, builtin)
    assert not rev.holds and rev.witness["clause"] == "x_stab_containment"
    assert recheck_witness(rev, mirrored, builtin)
    coset = verify_cnot_coset(mirrored, builtin)
    assert not coset.holds and recheck_witness(coset, mirrored, builtin)


def test_cnot_corrupted_target_map(builtin, mirrored):
    flipped = mirrored.map_a.rows[0] ^ 1  # one flipped bit leaves the coset
    bad = CssCode(
        mirrored.n,
        mirrored.k,
        mirrored.c1,
        mirrored.c2,
        mirrored.x_stab,
        mirrored.z_stab,
        BinaryMatrix((flipped,), 15),
    )
    cond = check_cnot_condition(builtin, bad)
    coset = verify_cnot_coset(builtin, bad)
    assert not cond.holds and cond.witness["clause"] == "quotient_alignment"
    assert not coset.holds and recheck_witness(coset, builtin, bad)


def test_length_mismatch(builtin):
    with pytest.raises(TransversalityError):
        check_cnot_condition(builtin, steane())
    with pytest.raises(TransversalityError):
        HybridSystem(builtin, builtin, steane())


# CZ ---------------------------------------------------------------------------------------


def test_cz_builtin_mirror(builtin, mirrored):
    cond = check_cz_condition(builtin, mirrored)
    assert cond.holds and cond.details["product"] == [[1]]
    phase = verify_cz_phase(builtin, mirrored)
    assert phase.holds and phase.checks_performed == 4 * 16 * 1024


def test_cz_builtin_with_itself_holds(builtin):
    # Every C1 word pairs evenly with G0 and A.A = 15 is odd, so the
    # sufficient condition is met; the phase check agrees.
    assert check_cz_condition(builtin, builtin).holds
    assert verify_cz_phase(builtin, builtin).holds


def test_cz_negative_control(mirrored):
    cond = check_cz_condition(mirrored, mirrored)
    assert not cond.holds and cond.witness["clause"] == "map_in_c4"
    phase = verify_cz_phase(mirrored, mirrored)
    assert not phase.holds and recheck_witness(phase, mirrored, mirrored)


def test_cz_without_stabilizers():
    q = three_qubit().base
    # 111 . 111 = 3 is odd, matching the logical phase on |1>|1>
    assert verify_cz_phase(q, q).holds


# T and TX -------------------------------------------------------------------------------


def test_t_builtin(builtin):
    v = verify_t_transversality(builtin)
    assert v.holds and v.induced_sign == -1
    assert v.details["residues"] == {"0": 0, "1": 7}


def test_t_three_qubit_fails():
    q = three_qubit()
    v = verify_t_transversality(q)
    assert not v.holds and v.witness["clause"] == "wrong_phase" and v.witness["weight_mod8"] == 3
    assert recheck_witness(v, q)


def test_t_non_constant_weight(builtin):
    # label the logical qubit by a weight-1 vector: C1 membership is lost but the
    # weights of its coset are not constant mod 8
    q = builtin.base
    bad = CssCode(q.n, q.k, q.c1, q.c2, q.x_stab, q.z_stab, BinaryMatrix((1,), 15))
    v = verify_t_transversality(bad)
    assert not v.holds and v.witness["clause"] == "non_constant_weight"
    assert recheck_witness(v, bad)


def test_tx(builtin, mirrored):
    v = verify_tx_transversality(mirrored, builtin)
    assert v.holds and v.details["reduction"] == "hadamard_conjugation" and v.induced_sign == -1
    q3 = three_qubit()
    assert not verify_tx_transversality(mirror(q3), q3).holds
    with pytest.raises(TransversalityError):
        verify_tx_transversality(mirrored, steane())


# Toffoli -------------------------------------------------------------------------------------


def test_toffoli_hybrid(builtin, mirrored):
    v = verify_toffoli_transversality(HybridSystem.from_triorthogonal(builtin))
    assert v.holds and v.checks_performed == 4 * 16 * 16


def test_toffoli_all_same_fails(builtin):
    sys = HybridSystem(builtin, builtin, builtin)
    v = verify_toffoli_transversality(sys)
    assert not v.holds
    assert recheck_witness(v, *sys.blocks)
    assert verify_toffoli_transversality(sys).witness == v.witness


def test_toffoli_psi_zero_reduction(builtin, mirrored):
    # psi1 = 0: y1 AND (x + y2) must lie in the target's stabilizer coset of 0
    b1 = builtin.base
    for y1 in iter_span(b1.x_stab):
        for y2 in iter_span(b1.x_stab):
            for psi2 in (0, 1):
                prod = y1 & (b1.logical_rep(psi2) ^ y2)
                assert rowspace_contains(mirrored.x_stab, prod)


def test_toffoli_symmetry(builtin, mirrored):
    a = verify_toffoli_transversality(HybridSystem(builtin, mirrored, builtin))
    b = verify_toffoli_transversality(HybridSystem(mirrored, builtin, builtin))
    assert a.holds == b.holds


# agreement with the dense oracle ------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(small_css(), small_css())
def test_condition_implies_coset_and_oracle(qa, qb):
    if qa.n != qb.n or qa.k != qb.k:
        return
    cnot = verify_cnot_coset(qa, qb)
    assert cnot.holds == transversal_cnot_ok(qa, qb)
    if check_cnot_condition(qa, qb).holds:
        assert cnot.holds
    if not cnot.holds:
        assert recheck_witness(cnot, qa, qb)
    cz = verify_cz_phase(qa, qb)
    assert cz.holds == transversal_cz_ok(qa, qb)
    if check_cz_condition(qa, qb).holds:
        assert cz.holds
    if not cz.holds:
        assert recheck_witness(cz, qa, qb)


@settings(max_examples=60, deadline=None)
@given(small_css())
def test_t_verdict_matches_phases(q):
    v = verify_t_transversality(q)
    # oracle: every coset element's weight mod 8 equals s * |psi| for one sign s
    ok_signs = {1, -1}
    for psi in range(2**q.k):
        ws = {(q.logical_rep(psi) ^ y).bit_count() % 8 for y in iter_span(q.x_stab)}
        ones = psi.bit_count()
        ok_signs &= {s for s in (1, -1) if len(ws) == 1 and (s * ones - next(iter(ws))) % 8 == 0}
    assert v.holds == bool(ok_signs)
    if not v.holds:
        assert recheck_witness(v, q)
