"""Dense GF(2) linear algebra on bit-packed rows.

Rows are Python integers; bit ``j`` of a row is the entry in column ``j``.
Python ints are arbitrary width, so a row of any length is a single object
and a row addition is one XOR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def from_indices(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


@dataclass(frozen=True)
class BitMatrix:
    """Immutable binary matrix; ``rows[i]`` is row ``i`` packed into an int."""

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError(f"row {r:#x} does not fit in {self.ncols} columns")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls((0,) * nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def from_dense(cls, array) -> "BitMatrix":
        a = np.asarray(array, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows = tuple(from_indices(np.flatnonzero(row).tolist()) for row in a)
        return cls(rows, a.shape[1])

    @classmethod
    def from_support(cls, supports: Sequence[Iterable[int]], ncols: int) -> "BitMatrix":
        """Build from per-row column indices. Repeated indices cancel mod 2."""
        return cls(tuple(from_indices(s) for s in supports), ncols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i, bits(r)] = 1
        return out

    def row_support(self, i: int) -> list[int]:
        return bits(self.rows[i])

    def transpose(self) -> "BitMatrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in bits(r):
                cols[j] |= 1 << i
        return BitMatrix(tuple(cols), len(self.rows))

    def mul_vec(self, vec: int) -> int:
        """Syndrome ``M @ vec`` packed as an int over the rows."""
        out = 0
        for i, r in enumerate(self.rows):
            if popcount(r & vec) & 1:
                out |= 1 << i
        return out

    def matmul_t(self, other: "BitMatrix") -> "BitMatrix":
        """``self @ other.T``; both operands share the column space."""
        if self.ncols != other.ncols:
            raise LengthMismatch(f"{self.ncols} != {other.ncols} columns")
        return BitMatrix(tuple(other.mul_vec(r) for r in self.rows), other.nrows)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def row_weights(self) -> list[int]:
        return [popcount(r) for r in self.rows]

    def col_weights(self) -> list[int]:
        w = [0] * self.ncols
        for r in self.rows:
            for j in bits(r):
                w[j] += 1
        return w

    def nnz(self) -> int:
        return sum(popcount(r) for r in self.rows)

    def with_flipped(self, i: int, j: int) -> "BitMatrix":
        rows = list(self.rows)
        rows[i] ^= 1 << j
        return BitMatrix(tuple(rows), self.ncols)


@dataclass(frozen=True)
class EchelonForm:
    """Reduced row-echelon basis of a row space.

    ``rows[i]`` has its lowest set bit at ``pivots[i]`` and no other pivot
    column set. ``pivots`` is strictly increasing.
    """

    rows: tuple[int, ...]
    pivots: tuple[int, ...]
    ncols: int
    _by_pivot: dict = field(default=None, repr=False, compare=False)
    _pivot_mask: int = field(default=0, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_pivot", {1 << p: r for p, r in zip(self.pivots, self.rows)})
        object.__setattr__(self, "_pivot_mask", from_indices(self.pivots))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: int) -> int:
        """Canonical remainder of ``vec`` modulo the row space.

        In reduced form a basis row touches only its own pivot column, so each
        pivot bit of the input is cleared by exactly one XOR.
        """
        hit = vec & self._pivot_mask
        while hit:
            low = hit & -hit
            vec ^= self._by_pivot[low]
            hit ^= low
        return vec

    def contains(self, vec: int) -> bool:
        return self.reduce(vec) == 0


def _basis_by_low_bit(rows: Iterable[int]) -> dict[int, int]:
    basis: dict[int, int] = {}
    for row in rows:
        while row:
            low = row & -row
            b = basis.get(low)
            if b is None:
                basis[low] = row
                break
            row ^= b
    return basis


def echelon(mat: BitMatrix | Sequence[int], ncols: int | None = None) -> EchelonForm:
    """Reduced row-echelon form of ``mat`` (pivot = lowest set bit)."""
    if isinstance(mat, BitMatrix):
        rows, ncols = mat.rows, mat.ncols
    else:
        rows = list(mat)
        if ncols is None:
            ncols = max((r.bit_length() for r in rows), default=0)
    basis = _basis_by_low_bit(rows)
    lows = sorted(basis)
    # back-substitution, highest pivot first
    for i in range(len(lows) - 1, -1, -1):
        lo = lows[i]
        r = basis[lo]
        for hi in lows[i + 1:]:
            if r & hi:
                r ^= basis[hi]
        basis[lo] = r
    pivots = tuple(lo.bit_length() - 1 for lo in lows)
    return EchelonForm(tuple(basis[lo] for lo in lows), pivots, ncols)


def rank(mat: BitMatrix | Sequence[int]) -> int:
    rows = mat.rows if isinstance(mat, BitMatrix) else mat
    return len(_basis_by_low_bit(rows))


def kernel_basis(mat: BitMatrix) -> BitMatrix:
    """Basis of ``{x : mat @ x = 0}`` as the rows of a matrix."""
    ech = echelon(mat)
    pivot_set = set(ech.pivots)
    out = []
    for f in range(mat.ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for p, r in zip(ech.pivots, ech.rows):
            if (r >> f) & 1:
                v |= 1 << p
        out.append(v)
    return BitMatrix(tuple(out), mat.ncols)


def in_row_space(ech: EchelonForm, vec: int | Sequence[int]) -> bool:
    """Membership of ``vec`` (int or 0/1 sequence) in the row space of ``ech``."""
    if not isinstance(vec, int):
        seq = list(vec)
        if len(seq) != ech.ncols:
            raise LengthMismatch(f"vector of length {len(seq)} vs {ech.ncols} columns")
        vec = from_indices(i for i, x in enumerate(seq) if x & 1)
    elif vec.bit_length() > ech.ncols:
        raise LengthMismatch(f"vector has bit {vec.bit_length() - 1} beyond {ech.ncols} columns")
    return ech.contains(vec)


def span_elements(rows: Sequence[int]) -> Iterable[int]:
    """All ``2**len(rows)`` combinations, in Gray-code order starting at 0."""
    v = 0
    yield v
    for i in range(1, 1 << len(rows)):
        v ^= rows[(i & -i).bit_length() - 1]
        yield v
