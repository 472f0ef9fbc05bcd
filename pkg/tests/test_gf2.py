import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import dense, naive_kernel, naive_rank, span_set
from topocodes.errors import LengthMismatch
from topocodes.gf2 import (BitMatrix, bits, echelon, from_indices, in_row_space, kernel_basis,
                           popcount, rank, span_elements)


@st.composite
def matrices(draw, max_rows=8, max_cols=10):
    ncols = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), min_size=0, max_size=max_rows))
    return BitMatrix(tuple(rows), ncols)


def test_bits_roundtrip():
    assert bits(0b101001) == [0, 3, 5]
    assert from_indices([0, 3, 5]) == 0b101001
    assert popcount(0b1111) == 4


def test_row_out_of_range_rejected():
    with pytest.raises(ValueError):
        BitMatrix((0b1000,), 3)


def test_dense_roundtrip():
    a = np.array([[1, 0, 1], [0, 1, 1]])
    m = BitMatrix.from_dense(a)
    assert m.rows == (0b101, 0b110)
    assert (m.to_dense() == a).all()
    assert m.transpose().transpose() == m


def test_identity_rank():
    assert rank(BitMatrix.identity(7)) == 7
    assert kernel_basis(BitMatrix.identity(7)).nrows == 0


@given(matrices())
def test_rank_matches_naive(m):
    assert rank(m) == (naive_rank(dense(m.rows, m.ncols)) if m.nrows else 0)


@given(matrices())
def test_kernel_basis(m):
    ker = kernel_basis(m)
    assert ker.nrows == m.ncols - rank(m)
    assert rank(ker) == ker.nrows
    for v in ker.rows:
        assert m.mul_vec(v) == 0
    if m.nrows:
        assert ker.nrows == len(naive_kernel(dense(m.rows, m.ncols)))


@given(matrices(max_rows=6, max_cols=7), st.integers(0, 127))
def test_in_row_space_matches_span(m, v):
    v &= (1 << m.ncols) - 1
    assert in_row_space(echelon(m), v) == (v in span_set(m.rows))


@given(matrices())
def test_echelon_is_reduced(m):
    ech = echelon(m)
    assert list(ech.pivots) == sorted(set(ech.pivots))
    for p, r in zip(ech.pivots, ech.rows):
        assert r & -r == 1 << p
        for q in ech.pivots:
            if q != p:
                assert not r >> q & 1
    for r in m.rows:
        assert ech.contains(r)
        assert ech.reduce(ech.reduce(r ^ 1)) == ech.reduce(r ^ 1)


@given(matrices(max_rows=5))
def test_span_elements_enumerates_span(m):
    elems = list(span_elements(m.rows))
    assert len(elems) == 1 << m.nrows
    assert set(elems) == span_set(m.rows)


@given(matrices(), matrices())
def test_matmul_t_matches_numpy(a, b):
    if a.ncols != b.ncols:
        b = BitMatrix(tuple(r & ((1 << a.ncols) - 1) for r in b.rows), a.ncols)
    got = a.matmul_t(b)
    want = (dense(a.rows, a.ncols).astype(int) @ dense(b.rows, a.ncols).T.astype(int)) % 2
    assert got.shape == (a.nrows, b.nrows)
    if a.nrows and b.nrows:
        assert (got.to_dense() == want).all()


def test_in_row_space_length_mismatch():
    ech = echelon(BitMatrix((0b11,), 2))
    assert in_row_space(ech, [1, 1])
    with pytest.raises(LengthMismatch):
        in_row_space(ech, [1, 1, 0])
    with pytest.raises(LengthMismatch):
        in_row_space(ech, 0b100)


def test_weights():
    m = BitMatrix.from_support([[0, 1], [1, 2, 3]], 4)
    assert m.row_weights() == [2, 3]
    assert m.col_weights() == [1, 2, 1, 1]
    assert m.nnz() == 5
    assert m.with_flipped(0, 3).row_support(0) == [0, 1, 3]
