"""Dense linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a row int is the entry in column ``j``.  Matrices and vectors are
immutable; every operation returns a fresh value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ShapeError(ValueError):
    """Raised when operand dimensions do not line up."""


def popcount(x: int) -> int:
    return x.bit_count()


def bits_of(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def int_from_bits(indices: Iterable[int]) -> int:
    x = 0
    for i in indices:
        x ^= 1 << i
    return x


@dataclass(frozen=True)
class BitVector:
    length: int
    data: int = 0

    def __post_init__(self) -> None:
        if self.data < 0 or self.data >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(length, 0)

    @classmethod
    def from_list(cls, bits: Sequence[int]) -> BitVector:
        return cls(len(bits), int_from_bits(i for i, b in enumerate(bits) if b & 1))

    @classmethod
    def from_str(cls, text: str) -> BitVector:
        text = text.strip()
        return cls.from_list([1 if c == "1" else 0 for c in text])

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BitVector:
        return cls(length, int_from_bits(support))

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.data >> i) & 1

    def __len__(self) -> int:
        return self.length

    def __xor__(self, other: BitVector) -> BitVector:
        if other.length != self.length:
            raise ShapeError("vector lengths differ")
        return BitVector(self.length, self.data ^ other.data)

    __add__ = __xor__

    def __and__(self, other: BitVector) -> BitVector:
        if other.length != self.length:
            raise ShapeError("vector lengths differ")
        return BitVector(self.length, self.data & other.data)

    def dot(self, other: BitVector) -> int:
        if other.length != self.length:
            raise ShapeError("vector lengths differ")
        return popcount(self.data & other.data) & 1

    @property
    def weight(self) -> int:
        return popcount(self.data)

    def support(self) -> list[int]:
        return bits_of(self.data)

    def to_list(self) -> list[int]:
        return [(self.data >> i) & 1 for i in range(self.length)]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_list(), dtype=np.uint8)

    def is_zero(self) -> bool:
        return self.data == 0

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise ShapeError("row count does not match nrows")
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise ValueError("bits set beyond matrix width")

    # construction

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_ints(cls, rows: Sequence[int], ncols: int) -> BitMatrix:
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != ncols:
                raise ShapeError("ragged rows")
            packed.append(int_from_bits(j for j, b in enumerate(row) if b & 1))
        return cls(len(packed), ncols, tuple(packed))

    @classmethod
    def from_strings(cls, rows: Sequence[str], ncols: int | None = None) -> BitMatrix:
        return cls.from_lists([[1 if c == "1" else 0 for c in r.strip()] for r in rows], ncols)

    @classmethod
    def from_supports(cls, supports: Sequence[Iterable[int]], ncols: int) -> BitMatrix:
        return cls(len(supports), ncols, tuple(int_from_bits(s) for s in supports))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> BitMatrix:
        """Build a matrix whose column ``j`` is the int ``columns[j]``."""
        return cls(len(columns), nrows, tuple(columns)).transpose()

    @classmethod
    def from_numpy(cls, array: np.ndarray) -> BitMatrix:
        array = np.asarray(array)
        if array.ndim != 2:
            raise ShapeError("expected a 2D array")
        return cls.from_lists((array & 1).astype(np.uint8).tolist(), array.shape[1])

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], ncols: int) -> BitMatrix:
        for v in vectors:
            if v.length != ncols:
                raise ShapeError("vector length differs from width")
        return cls(len(vectors), ncols, tuple(v.data for v in vectors))

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(idx)
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def column(self, j: int) -> int:
        """Column ``j`` packed as an int over row indices."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                out |= 1 << i
        return out

    def columns(self) -> tuple[int, ...]:
        return self.transpose().rows

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def to_numpy(self) -> np.ndarray:
        return np.array(self.to_lists(), dtype=np.uint8).reshape(self.nrows, self.ncols)

    def supports(self) -> list[list[int]]:
        return [bits_of(r) for r in self.rows]

    def is_zero(self) -> bool:
        return not any(self.rows)

    def row_weights(self) -> list[int]:
        return [popcount(r) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join("".join(str((r >> j) & 1) for j in range(self.ncols)) for r in self.rows)

    # algebra

    def transpose(self) -> BitMatrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            bit = 1 << i
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= bit
                r ^= low
        return BitMatrix(self.ncols, self.nrows, tuple(cols))

    @property
    def T(self) -> BitMatrix:
        return self.transpose()

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        return multiply(self, other)

    def __add__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return BitMatrix(self.nrows, self.ncols, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def apply(self, v: BitVector | int) -> BitVector:
        """Matrix-vector product ``M v``."""
        data = v.data if isinstance(v, BitVector) else v
        if isinstance(v, BitVector) and v.length != self.ncols:
            raise ShapeError("vector length differs from matrix width")
        out = 0
        for i, r in enumerate(self.rows):
            if popcount(r & data) & 1:
                out |= 1 << i
        return BitVector(self.nrows, out)

    def apply_int(self, data: int) -> int:
        out = 0
        for i, r in enumerate(self.rows):
            if popcount(r & data) & 1:
                out |= 1 << i
        return out

    def select_rows(self, indices: Sequence[int]) -> BitMatrix:
        return BitMatrix(len(indices), self.ncols, tuple(self.rows[i] for i in indices))

    def select_columns(self, indices: Sequence[int]) -> BitMatrix:
        rows = []
        for r in self.rows:
            x = 0
            for k, j in enumerate(indices):
                if (r >> j) & 1:
                    x |= 1 << k
            rows.append(x)
        return BitMatrix(self.nrows, len(indices), tuple(rows))

    def hstack(self, other: BitMatrix) -> BitMatrix:
        if self.nrows != other.nrows:
            raise ShapeError("row counts differ")
        return BitMatrix(
            self.nrows,
            self.ncols + other.ncols,
            tuple(a | (b << self.ncols) for a, b in zip(self.rows, other.rows)),
        )

    def vstack(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.ncols:
            raise ShapeError("column counts differ")
        return BitMatrix(self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def rank(self) -> int:
        return rank(self)


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.nrows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    out = []
    brows = b.rows
    for r in a.rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= brows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return BitMatrix(a.nrows, b.ncols, tuple(out))


@dataclass(frozen=True)
class RowReduction:
    reduced: BitMatrix
    rank: int
    pivots: tuple[int, ...]
    transform: BitMatrix


def row_reduce(m: BitMatrix) -> RowReduction:
    """Reduced row-echelon form with the invertible transform that produces it.

    Pivoting is deterministic: columns are scanned left to right and the first
    available row holding a one becomes the pivot row.
    """
    rows = list(m.rows)
    trans = [1 << i for i in range(m.nrows)]
    pivots: list[int] = []
    r = 0
    for col in range(m.ncols):
        if r == m.nrows:
            break
        bit = 1 << col
        pivot = next((i for i in range(r, m.nrows) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        trans[r], trans[pivot] = trans[pivot], trans[r]
        prow, ptrans = rows[r], trans[r]
        for i in range(m.nrows):
            if i != r and rows[i] & bit:
                rows[i] ^= prow
                trans[i] ^= ptrans
        pivots.append(col)
        r += 1
    return RowReduction(
        BitMatrix(m.nrows, m.ncols, tuple(rows)),
        len(pivots),
        tuple(pivots),
        BitMatrix(m.nrows, m.nrows, tuple(trans)),
    )


def _echelon(rows: Iterable[int]) -> dict[int, int]:
    """Echelon basis keyed by leading (lowest) set bit."""
    basis: dict[int, int] = {}
    for r in rows:
        r = _reduce(r, basis)
        if r:
            basis[(r & -r).bit_length() - 1] = r
    return basis


def _reduce(x: int, basis: dict[int, int]) -> int:
    while x:
        lead = (x & -x).bit_length() - 1
        b = basis.get(lead)
        if b is None:
            return x
        x ^= b
    return 0


def rank(m: BitMatrix | Sequence[int]) -> int:
    rows = m.rows if isinstance(m, BitMatrix) else m
    return len(_echelon(rows))


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Standard free-variable basis of ``{v : M v = 0}`` read off the RREF."""
    red = row_reduce(m)
    pivset = set(red.pivots)
    prow = red.reduced.rows[: red.rank]
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = 1 << free
        for p, row in zip(red.pivots, prow):
            if (row >> free) & 1:
                v |= 1 << p
        basis.append(v)
    return BitMatrix(len(basis), m.ncols, tuple(basis))


def solve(m: BitMatrix, s: BitVector) -> BitVector | None:
    """Some ``x`` with ``M x = s``, or ``None`` when ``s`` is outside the image."""
    if s.length != m.nrows:
        raise ShapeError("syndrome length differs from row count")
    red = row_reduce(m)
    t = red.transform.apply(s).data
    if t >> red.rank:
        return None
    x = 0
    for i, p in enumerate(red.pivots):
        if (t >> i) & 1:
            x |= 1 << p
    return BitVector(m.ncols, x)


def rowspace_basis(m: BitMatrix) -> BitMatrix:
    """Nonzero rows of the RREF."""
    red = row_reduce(m)
    return BitMatrix(red.rank, m.ncols, red.reduced.rows[: red.rank])


def in_rowspace(m: BitMatrix, v: BitVector | int) -> bool:
    data = v.data if isinstance(v, BitVector) else v
    return _reduce(data, _echelon(m.rows)) == 0


class Span:
    """Incremental echelon basis supporting membership and extension tests."""

    def __init__(self, rows: Iterable[int] = ()) -> None:
        self._basis: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def reduce(self, x: int) -> int:
        return _reduce(x, self._basis)

    def __contains__(self, x: int) -> bool:
        return self.reduce(x) == 0

    def add(self, x: int) -> bool:
        """Add ``x``; return True iff it enlarged the span."""
        x = self.reduce(x)
        if not x:
            return False
        self._basis[(x & -x).bit_length() - 1] = x
        return True

    def __len__(self) -> int:
        return len(self._basis)


def subspace_sum(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.ncols != b.ncols:
        raise ShapeError("widths differ")
    return rowspace_basis(a.vstack(b))


def subspace_intersection(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Basis of rowspace(A) ∩ rowspace(B) via the kernel of [Aᵀ | Bᵀ]."""
    if a.ncols != b.ncols:
        raise ShapeError("widths differ")
    stacked = a.vstack(b)
    ker = kernel_basis(stacked.transpose())
    mask = (1 << a.nrows) - 1
    vecs = []
    for k in ker.rows:
        u = k & mask
        acc = 0
        for i in bits_of(u):
            acc ^= a.rows[i]
        vecs.append(acc)
    return rowspace_basis(BitMatrix(len(vecs), a.ncols, tuple(vecs)))


def inverse(m: BitMatrix) -> BitMatrix:
    if m.nrows != m.ncols:
        raise ShapeError("matrix is not square")
    red = row_reduce(m)
    if red.rank != m.nrows:
        raise ValueError("matrix is singular")
    return red.transform


def complement_basis(sub: BitMatrix, whole: BitMatrix) -> BitMatrix:
    """Rows of ``whole`` that extend a basis of ``sub`` to a basis of sub + whole."""
    span = Span(sub.rows)
    picked = [r for r in whole.rows if span.add(r)]
    return BitMatrix(len(picked), whole.ncols, tuple(picked))


def pack_words(values: Sequence[int], nbits: int) -> np.ndarray:
    """Pack ints into a ``(len(values), words)`` uint64 array."""
    words = max(1, (nbits + 63) // 64)
    out = np.zeros((len(values), words), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, v in enumerate(values):
        for w in range(words):
            out[i, w] = (v >> (64 * w)) & mask
    return out


def unpack_words(row: np.ndarray) -> int:
    x = 0
    for w, word in enumerate(row.tolist()):
        x |= int(word) << (64 * w)
    return x
