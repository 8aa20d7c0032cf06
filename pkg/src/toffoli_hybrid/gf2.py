"""Exact linear algebra over GF(2).

Rows are stored as Python integers used as bitsets: bit ``j`` of a row is the
entry in column ``j``.  Arbitrary-precision ints give multi-word rows for free,
so there is no cap on the number of columns.  Bulk enumeration (row spaces,
weight enumerators, coset sweeps) goes through packed ``uint64`` numpy arrays
of shape ``(count, words)``.

Text format for matrices: one row per line, characters ``0``/``1`` with
optional single spaces between bits, ``#`` starts a comment line, blank lines
are ignored, all rows have equal length.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_ENUM_LIMIT = 24


class GF2Error(ValueError):
    """Shape or precondition failure in a GF(2) operation."""


class EnumerationLimitError(GF2Error):
    """Raised when a space is too large to enumerate."""

    def __init__(self, rank: int, limit: int):
        super().__init__(f"rank {rank} exceeds enumeration limit {limit}")
        self.rank = rank
        self.limit = limit


def _bits_to_int(bits: Iterable[int]) -> int:
    value = 0
    for j, b in enumerate(bits):
        if b not in (0, 1):
            raise GF2Error(f"entry {b!r} is not a bit")
        if b:
            value |= 1 << j
    return value


def _int_to_str(value: int, length: int) -> str:
    return "".join("1" if value >> j & 1 else "0" for j in range(length))


def _str_to_int(text: str) -> int:
    text = text.replace(" ", "")
    if set(text) - {"0", "1"}:
        raise GF2Error(f"not a bit string: {text!r}")
    return _bits_to_int(int(c) for c in text)


@dataclass(frozen=True)
class BinaryVector:
    """A length-``length`` bit vector, packed into ``bits`` (bit j = entry j)."""

    bits: int
    length: int

    def __post_init__(self):
        if self.length < 0 or self.bits < 0 or self.bits >> self.length:
            raise GF2Error("bits do not fit the declared length")

    @classmethod
    def from_str(cls, text: str) -> BinaryVector:
        text = text.replace(" ", "")
        return cls(_str_to_int(text), len(text))

    @classmethod
    def from_array(cls, arr) -> BinaryVector:
        arr = np.asarray(arr).ravel()
        return cls(_bits_to_int(int(x) for x in arr), arr.size)

    @classmethod
    def zeros(cls, length: int) -> BinaryVector:
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> BinaryVector:
        return cls((1 << length) - 1, length)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def to_array(self) -> np.ndarray:
        return np.array([self.bits >> j & 1 for j in range(self.length)], dtype=np.uint8)

    def dot(self, other: BinaryVector) -> int:
        _check_len(self, other.length)
        return (self.bits & other.bits).bit_count() & 1

    def __xor__(self, other: BinaryVector) -> BinaryVector:
        _check_len(self, other.length)
        return BinaryVector(self.bits ^ other.bits, self.length)

    __add__ = __xor__

    def __and__(self, other: BinaryVector) -> BinaryVector:
        _check_len(self, other.length)
        return BinaryVector(self.bits & other.bits, self.length)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return self.bits >> j & 1

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return _int_to_str(self.bits, self.length)


def _check_len(v: BinaryVector, length: int) -> None:
    if v.length != length:
        raise GF2Error(f"length mismatch: {v.length} != {length}")


@dataclass(frozen=True)
class BinaryMatrix:
    """An immutable ``nrows x cols`` matrix over GF(2).

    ``rows`` holds one integer bitset per row.  A matrix with zero rows is the
    generator of the trivial space ``{0}``.
    """

    rows: tuple[int, ...]
    cols: int

    def __post_init__(self):
        if self.cols < 1:
            raise GF2Error("a matrix needs at least one column")
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if r < 0 or r >> self.cols:
                raise GF2Error("row does not fit in the column count")

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence, cols: int | None = None) -> BinaryMatrix:
        """Build from bit strings, bit sequences, BinaryVectors or ints.

        ``cols`` is required when ``rows`` is empty or given as ints.
        """
        ints = []
        width = cols
        for row in rows:
            if isinstance(row, BinaryVector):
                value, length = row.bits, row.length
            elif isinstance(row, str):
                row = row.replace(" ", "")
                value, length = _str_to_int(row), len(row)
            elif isinstance(row, (int, np.integer)):
                value, length = int(row), cols
            else:
                row = list(row)
                value, length = _bits_to_int(int(b) for b in row), len(row)
            if length is None:
                raise GF2Error("cols must be given for integer rows")
            if width is None:
                width = length
            elif length != width:
                raise GF2Error(f"ragged rows: {length} != {width}")
            ints.append(value)
        if width is None:
            raise GF2Error("cols must be given for an empty matrix")
        return cls(tuple(ints), width)

    @classmethod
    def from_array(cls, arr) -> BinaryMatrix:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise GF2Error("expected a 2-d array")
        if np.any((arr != 0) & (arr != 1)):
            raise GF2Error("entries must be 0 or 1")
        return cls.from_rows(arr.astype(np.uint8).tolist(), cols=arr.shape[1])

    @classmethod
    def empty(cls, cols: int) -> BinaryMatrix:
        return cls((), cols)

    @classmethod
    def identity(cls, n: int) -> BinaryMatrix:
        return cls(tuple(1 << j for j in range(n)), n)

    @classmethod
    def parse(cls, text: str) -> BinaryMatrix:
        rows = []
        for line in text.splitlines():
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "  " in stripped:
                raise GF2Error(f"bits may be separated by single spaces only: {line!r}")
            rows.append(stripped)
        if not rows:
            raise GF2Error("no rows in matrix text")
        return cls.from_rows(rows)

    @classmethod
    def load(cls, path: str | Path) -> BinaryMatrix:
        return cls.parse(Path(path).read_text())

    # views ------------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    def row(self, i: int) -> BinaryVector:
        return BinaryVector(self.rows[i], self.cols)

    def vectors(self) -> list[BinaryVector]:
        return [BinaryVector(r, self.cols) for r in self.rows]

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.cols):
                out[i, j] = r >> j & 1
        return out

    def to_strings(self) -> list[str]:
        return [_int_to_str(r, self.cols) for r in self.rows]

    def dumps(self) -> str:
        return "\n".join(self.to_strings()) + "\n"

    def __str__(self) -> str:
        return "\n".join(self.to_strings()) if self.rows else f"<empty x {self.cols}>"

    def __len__(self) -> int:
        return len(self.rows)

    # algebra ------------------------------------------------------------

    def vstack(self, other: BinaryMatrix) -> BinaryMatrix:
        if other.cols != self.cols:
            raise GF2Error(f"width mismatch: {self.cols} != {other.cols}")
        return BinaryMatrix(self.rows + other.rows, self.cols)

    def transpose(self) -> BinaryMatrix:
        if not self.rows:
            raise GF2Error("cannot transpose a matrix with no rows")
        cols = [0] * self.cols
        for i, r in enumerate(self.rows):
            for j in range(self.cols):
                if r >> j & 1:
                    cols[j] |= 1 << i
        return BinaryMatrix(tuple(cols), self.nrows)

    def mul_vec(self, v: BinaryVector | int) -> int:
        """Return ``M v^T`` packed as an int (bit i = parity of row i with v)."""
        bits = v.bits if isinstance(v, BinaryVector) else int(v)
        if isinstance(v, BinaryVector):
            _check_len(v, self.cols)
        out = 0
        for i, r in enumerate(self.rows):
            if (r & bits).bit_count() & 1:
                out |= 1 << i
        return out

    def gram(self, other: BinaryMatrix) -> list[list[int]]:
        """``self @ other.T`` over GF(2) as a nested list."""
        if other.cols != self.cols:
            raise GF2Error(f"width mismatch: {self.cols} != {other.cols}")
        return [[(a & b).bit_count() & 1 for b in other.rows] for a in self.rows]

    def combine(self, coeffs: int) -> int:
        """XOR of the rows selected by the bits of ``coeffs``."""
        out = 0
        i = 0
        while coeffs:
            if coeffs & 1:
                out ^= self.rows[i]
            coeffs >>= 1
            i += 1
        return out


def rref(m: BinaryMatrix) -> tuple[BinaryMatrix, int, list[int]]:
    """Reduced row-echelon form with lowest-column-first pivoting.

    Returns ``(reduced, rank, pivot_cols)``.  ``reduced`` keeps the input row
    count; the trailing ``nrows - rank`` rows are zero.
    """
    rows = list(m.rows)
    pivots: list[int] = []
    r = 0
    for col in range(m.cols):
        bit = 1 << col
        hit = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if hit is None:
            continue
        rows[r], rows[hit] = rows[hit], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return BinaryMatrix(tuple(rows), m.cols), r, pivots


def rank(m: BinaryMatrix) -> int:
    return rref(m)[1]


class _Reducer:
    """Echelon basis supporting incremental insertion and reduction."""

    def __init__(self, rows: Iterable[int] = ()):
        self._basis: dict[int, int] = {}  # lowest set bit -> row
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> int:
        while v:
            low = v & -v
            row = self._basis.get(low)
            if row is None:
                return v
            v ^= row
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        low = v & -v
        # keep rows reduced against the new pivot so reduce() terminates fast
        for key, row in self._basis.items():
            if row & low:
                self._basis[key] = row ^ v
        self._basis[low] = v
        return True

    def __len__(self) -> int:
        return len(self._basis)


def nullspace(m: BinaryMatrix) -> BinaryMatrix:
    """Basis of ``{v : m v^T = 0}``, one row per free column of ``rref(m)``."""
    reduced, _r, pivots = rref(m)
    pivot_set = set(pivots)
    out = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, p in enumerate(pivots):
            if reduced.rows[i] >> f & 1:
                v |= 1 << p
        out.append(v)
    return BinaryMatrix(tuple(out), m.cols)


def _vec_bits(v: BinaryVector | int | str, cols: int) -> int:
    if isinstance(v, BinaryVector):
        _check_len(v, cols)
        return v.bits
    if isinstance(v, str):
        v = BinaryVector.from_str(v)
        _check_len(v, cols)
        return v.bits
    v = int(v)
    if v < 0 or v >> cols:
        raise GF2Error("vector does not fit the matrix width")
    return v


def rowspace_contains(m: BinaryMatrix, v: BinaryVector | int | str) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``m``."""
    bits = _vec_bits(v, m.cols)
    return _Reducer(m.rows).reduce(bits) == 0


def is_subspace(a: BinaryMatrix, b: BinaryMatrix) -> bool:
    """True iff every row of ``a`` lies in the row space of ``b``."""
    return first_outside(a, b) is None


def first_outside(a: BinaryMatrix, b: BinaryMatrix) -> int | None:
    """Index of the first row of ``a`` outside rowspace(b), or None."""
    if a.cols != b.cols:
        raise GF2Error(f"width mismatch: {a.cols} != {b.cols}")
    red = _Reducer(b.rows)
    for i, r in enumerate(a.rows):
        if red.reduce(r):
            return i
    return None


def same_rowspace(a: BinaryMatrix, b: BinaryMatrix) -> bool:
    return is_subspace(a, b) and is_subspace(b, a)


def independent_rows(m: BinaryMatrix) -> BinaryMatrix:
    """Greedy maximal independent subset of the rows, in input order."""
    red = _Reducer()
    keep = [r for r in m.rows if red.add(r)]
    return BinaryMatrix(tuple(keep), m.cols)


def quotient_basis(c1_gen: BinaryMatrix, c2perp_gen: BinaryMatrix) -> BinaryMatrix:
    """Representatives for a basis of rowspace(c1_gen) / rowspace(c2perp_gen).

    Rows of ``c1_gen`` are scanned in order and kept when they are independent
    of the quotient space built so far, so the result consists of original
    rows of ``c1_gen``.
    """
    idx = first_outside(c2perp_gen, c1_gen)
    if idx is not None:
        raise GF2Error(f"row {idx} of the subspace generator ({c2perp_gen.row(idx)}) is not in the ambient space")
    red = _Reducer(c2perp_gen.rows)
    keep = [r for r in c1_gen.rows if red.add(r)]
    return BinaryMatrix(tuple(keep), c1_gen.cols)


def solve_left(m: BinaryMatrix, v: int) -> int | None:
    """Coefficient bitmask ``c`` with ``combine(c) == v``, or None."""
    # augmented reduction tracking which original rows were combined
    basis: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(m.rows):
        tag = 1 << i
        while r:
            low = r & -r
            hit = basis.get(low)
            if hit is None:
                basis[low] = (r, tag)
                break
            r ^= hit[0]
            tag ^= hit[1]
    coeffs = 0
    while v:
        low = v & -v
        hit = basis.get(low)
        if hit is None:
            return None
        v ^= hit[0]
        coeffs ^= hit[1]
    return coeffs


def invert(square: list[list[int]]) -> list[list[int]]:
    """Inverse of a square 0/1 matrix over GF(2); raises if singular."""
    k = len(square)
    aug = [sum(square[i][j] << j for j in range(k)) | (1 << (k + i)) for i in range(k)]
    for col in range(k):
        hit = next((i for i in range(col, k) if aug[i] >> col & 1), None)
        if hit is None:
            raise GF2Error("matrix is singular over GF(2)")
        aug[col], aug[hit] = aug[hit], aug[col]
        for i in range(k):
            if i != col and aug[i] >> col & 1:
                aug[i] ^= aug[col]
    return [[aug[i] >> (k + j) & 1 for j in range(k)] for i in range(k)]


# enumeration ------------------------------------------------------------

_WORD = 64
_MASK = (1 << _WORD) - 1


def n_words(cols: int) -> int:
    return (cols + _WORD - 1) // _WORD


def pack(values: Sequence[int], cols: int) -> np.ndarray:
    """Pack int bitsets into a ``(len(values), words)`` uint64 array."""
    w = n_words(cols)
    out = np.zeros((len(values), w), dtype=np.uint64)
    for i, v in enumerate(values):
        for k in range(w):
            out[i, k] = (v >> (_WORD * k)) & _MASK
    return out


def unpack_row(words: np.ndarray) -> int:
    value = 0
    for k, w in enumerate(words.tolist()):
        value |= int(w) << (_WORD * k)
    return value


def span_array(basis: BinaryMatrix, limit: int = DEFAULT_ENUM_LIMIT) -> np.ndarray:
    """All ``2^r`` combinations of the (independent) rows of ``basis``, packed.

    Entry ``j`` is the XOR of the rows selected by the bits of ``j``.  Callers
    pass an independent basis; use :func:`independent_rows` first otherwise.
    """
    r = basis.nrows
    if r > limit:
        raise EnumerationLimitError(r, limit)
    words = pack(basis.rows, basis.cols)
    arr = np.zeros((1, words.shape[1]), dtype=np.uint64)
    for i in range(r):
        arr = np.concatenate([arr, arr ^ words[i]])
    return arr


def popcount(packed: np.ndarray) -> np.ndarray:
    """Hamming weight of each packed row (last axis = words)."""
    return np.bitwise_count(packed).sum(axis=-1, dtype=np.int64)


def parity_with(packed: np.ndarray, checks: BinaryMatrix) -> np.ndarray:
    """Bit matrix ``(count, checks.nrows)``: parity of each packed row with each check."""
    cw = pack(checks.rows, checks.cols)
    out = np.empty(packed.shape[:-1] + (checks.nrows,), dtype=np.uint8)
    for i in range(checks.nrows):
        out[..., i] = popcount(packed & cw[i]) & 1
    return out


def in_rowspace_mask(packed: np.ndarray, m: BinaryMatrix) -> np.ndarray:
    """Boolean mask: which packed rows lie in rowspace(m)."""
    checks = nullspace(m)
    if checks.nrows == 0:
        return np.ones(packed.shape[:-1], dtype=bool)
    return ~parity_with(packed, checks).any(axis=-1)


def enumerate_rowspace(m: BinaryMatrix, limit: int = DEFAULT_ENUM_LIMIT) -> list[BinaryVector]:
    """Every vector of rowspace(m) exactly once, in binary-counting order
    over a canonical (RREF) basis."""
    basis = _rref_basis(m)
    if basis.nrows > limit:
        raise EnumerationLimitError(basis.nrows, limit)
    return [BinaryVector(v, m.cols) for v in iter_span(basis)]


def iter_span(basis: BinaryMatrix) -> Iterator[int]:
    """Lazily yield the XOR combinations of ``basis`` rows in counting order."""
    for j in range(1 << basis.nrows):
        yield basis.combine(j)


def _rref_basis(m: BinaryMatrix) -> BinaryMatrix:
    reduced, r, _ = rref(m)
    return BinaryMatrix(reduced.rows[:r], m.cols)


def weight_enumerator(m: BinaryMatrix, limit: int = DEFAULT_ENUM_LIMIT, method: str = "auto") -> list[int]:
    """Weight distribution of rowspace(m): entry ``w`` counts vectors of weight ``w``.

    ``method`` is ``"direct"`` (enumerate the space), ``"macwilliams"``
    (enumerate the dual and transform) or ``"auto"`` (whichever is smaller).
    """
    basis = _rref_basis(m)
    r = basis.nrows
    dual_rank = m.cols - r
    if method == "auto":
        if r > limit and dual_rank > limit:
            raise EnumerationLimitError(min(r, dual_rank), limit)
        method = "direct" if r <= dual_rank or dual_rank > limit else "macwilliams"
        if r > limit:
            method = "macwilliams"
    if method == "direct":
        if r > limit:
            raise EnumerationLimitError(r, limit)
        return _direct_enumerator(basis, limit)
    if method == "macwilliams":
        if dual_rank > limit:
            raise EnumerationLimitError(dual_rank, limit)
        dual = nullspace(basis)
        return macwilliams(_direct_enumerator(dual, limit), m.cols)
    raise GF2Error(f"unknown method {method!r}")


def _direct_enumerator(basis: BinaryMatrix, limit: int) -> list[int]:
    weights = popcount(span_array(basis, limit))
    counts = np.bincount(weights, minlength=basis.cols + 1)
    return [int(c) for c in counts]


def krawtchouk(w: int, j: int, n: int) -> int:
    """Binary Krawtchouk polynomial K_w(j; n)."""
    return sum((-1) ** s * math.comb(j, s) * math.comb(n - j, w - s) for s in range(w + 1))


def macwilliams(dual_enum: Sequence[int], n: int) -> list[int]:
    """Weight enumerator of a code from that of its dual (exact integers)."""
    size = sum(dual_enum)
    out = []
    for w in range(n + 1):
        total = sum(b * krawtchouk(w, j, n) for j, b in enumerate(dual_enum) if b)
        q, rem = divmod(total, size)
        if rem:
            raise GF2Error("dual enumerator is not a linear code's enumerator")
        out.append(q)
    return out
