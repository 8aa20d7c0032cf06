import numpy as np
import pytest
from conftest import dense, rank_oracle, span_oracle
from hypothesis import given, settings
from hypothesis import strategies as st

from toffoli_hybrid.gf2 import (
    BinaryMatrix,
    BinaryVector,
    EnumerationLimitError,
    GF2Error,
    enumerate_rowspace,
    is_subspace,
    macwilliams,
    nullspace,
    quotient_basis,
    rank,
    rowspace_contains,
    rref,
    same_rowspace,
    solve_left,
    weight_enumerator,
)


def matrices(max_rows=6, max_cols=12):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.integers(0, 2**c - 1), max_size=max_rows).map(lambda rows: BinaryMatrix(tuple(rows), c))
    )


def test_parse_format_and_roundtrip():
    text = "# header\n1 1 0\n\n011\n"
    m = BinaryMatrix.parse(text)
    assert m.to_strings() == ["110", "011"]
    assert BinaryMatrix.parse(m.dumps()) == m
    with pytest.raises(GF2Error):
        BinaryMatrix.parse("110\n01\n")
    with pytest.raises(GF2Error):
        BinaryMatrix.parse("1  1\n")
    with pytest.raises(GF2Error):
        BinaryMatrix.parse("120\n")


def test_rref_examples(builtin):
    reduced, r, piv = rref(BinaryMatrix.identity(3))
    assert reduced == BinaryMatrix.identity(3) and r == 3 and piv == [0, 1, 2]
    assert rank(BinaryMatrix.from_rows(["110", "011", "101"])) == 2
    assert rank(builtin.generator) == 5


def test_nullspace_examples(builtin):
    ns = nullspace(BinaryMatrix.from_rows(["111"]))
    assert ns.nrows == 2 and same_rowspace(ns, BinaryMatrix.from_rows(["110", "011"]))
    assert nullspace(BinaryMatrix.identity(5)).nrows == 0
    assert rank(nullspace(builtin.g0)) == 11


def test_membership_and_subspace(builtin):
    m = BinaryMatrix.from_rows(["110", "011"])
    assert rowspace_contains(m, "000") and rowspace_contains(m, "101")
    # 110 + 011 = 101, so the all-ones vector is not in this span
    assert not rowspace_contains(m, "111")
    assert rowspace_contains(nullspace(builtin.g0), BinaryVector.ones(15))
    assert is_subspace(BinaryMatrix.empty(3), m)
    assert is_subspace(BinaryMatrix.from_rows(["110"]), m)
    assert is_subspace(builtin.g0, nullspace(builtin.generator))
    with pytest.raises(GF2Error):
        rowspace_contains(m, "1100")
    with pytest.raises(GF2Error):
        is_subspace(BinaryMatrix.from_rows(["1100"]), m)


def test_enumerate_rowspace(builtin):
    assert [str(v) for v in enumerate_rowspace(BinaryMatrix.empty(2))] == ["00"]
    assert {str(v) for v in enumerate_rowspace(BinaryMatrix.from_rows(["10", "01"]))} == {"00", "10", "01", "11"}
    vecs = enumerate_rowspace(builtin.g0)
    assert len(vecs) == 16 and {v.weight for v in vecs} == {0, 8}
    with pytest.raises(EnumerationLimitError) as err:
        enumerate_rowspace(BinaryMatrix.identity(10), limit=4)
    assert err.value.rank == 10


def test_quotient_basis(builtin):
    g = builtin.generator
    assert quotient_basis(g, g).nrows == 0
    a = quotient_basis(g, builtin.g0)
    assert a.nrows == 1 and rowspace_contains(builtin.g0, a.rows[0] ^ ((1 << 15) - 1))
    b = quotient_basis(nullspace(builtin.g0), nullspace(g))
    assert b.nrows == 1 and rowspace_contains(nullspace(g), b.rows[0] ^ ((1 << 15) - 1))
    with pytest.raises(GF2Error):
        quotient_basis(BinaryMatrix.from_rows(["110"]), BinaryMatrix.from_rows(["001"]))


def test_weight_enumerator_examples(builtin):
    assert weight_enumerator(BinaryMatrix.empty(3)) == [1, 0, 0, 0]
    assert weight_enumerator(BinaryMatrix.from_rows(["11"])) == [1, 0, 1]
    c2 = nullspace(builtin.g0)
    direct = weight_enumerator(c2, method="direct")
    assert direct[3] == 35
    assert weight_enumerator(c2, method="macwilliams") == direct
    assert sum(direct) == 2**11


def test_weight_enumerator_limits():
    big = BinaryMatrix.identity(30)
    # rank 30 > limit but the dual is trivial: MacWilliams route works
    assert weight_enumerator(big, limit=10)[30] == 1
    half = BinaryMatrix(tuple(1 << j for j in range(15)), 30)
    with pytest.raises(EnumerationLimitError):
        weight_enumerator(half, limit=10)


def test_multiword_rows():
    n = 158
    m = BinaryMatrix((1 << 157 | 1, 1 << 100 | 1 << 3), n)
    assert rank(m) == 2 and nullspace(m).nrows == 156
    assert rowspace_contains(m, (1 << 157) | (1 << 100) | (1 << 3) | 1)
    assert weight_enumerator(m) == [1, 0, 2, 0, 1] + [0] * (n - 4)


def test_solve_left():
    m = BinaryMatrix.from_rows(["110", "011"])
    assert solve_left(m, 0b101) == 0b11
    assert solve_left(m, 0b001) is None


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_nullity_and_double_dual(m):
    assert rank(m) == rank_oracle(m.to_array())
    ns = nullspace(m)
    assert rank(m) + ns.nrows == m.cols
    assert all(x == 0 for row in m.gram(ns) for x in row)
    assert same_rowspace(nullspace(ns), m)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_macwilliams_agrees_with_direct(m):
    direct = weight_enumerator(m, method="direct")
    assert weight_enumerator(m, method="macwilliams") == direct
    assert sum(direct) == 2 ** rank(m)
    assert macwilliams(weight_enumerator(nullspace(m)), m.cols) == direct


@settings(max_examples=100, deadline=None)
@given(matrices(max_rows=5, max_cols=8))
def test_enumeration_matches_oracle(m):
    vecs = enumerate_rowspace(m)
    as_tuples = {tuple(int(c) for c in str(v)) for v in vecs}
    assert len(as_tuples) == len(vecs)
    assert as_tuples == span_oracle(m.to_array())
    rng = np.random.default_rng(len(vecs))
    for _ in range(10):
        a, b = rng.integers(len(vecs), size=2)
        assert (vecs[a] ^ vecs[b]).bits in {v.bits for v in vecs}


def test_dense_roundtrip():
    rows = ["1010", "0111"]
    m = BinaryMatrix.from_array(dense(rows))
    assert m.to_strings() == rows
    assert np.array_equal(m.to_array(), dense(rows))
