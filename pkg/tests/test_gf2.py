from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_rank, mat_vec, span_of
from spacetime_forge.gf2 import (
    BitMatrix,
    BitVector,
    ShapeError,
    Span,
    complement_basis,
    in_rowspace,
    inverse,
    kernel_basis,
    multiply,
    pack_words,
    rank,
    row_reduce,
    rowspace_basis,
    solve,
    subspace_intersection,
    subspace_sum,
    unpack_words,
)


@st.composite
def matrices(draw, max_rows=7, max_cols=8):
    ncols = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << ncols) - 1), max_size=max_rows))
    return BitMatrix.from_ints(rows, ncols)


@given(matrices())
def test_rank_matches_span_size(m):
    assert rank(m) == brute_rank(m.rows)


@given(matrices())
def test_kernel_basis_spans_the_kernel(m):
    ker = kernel_basis(m)
    assert all(mat_vec(m.rows, v) == 0 for v in ker.rows)
    assert rank(ker) == ker.nrows == m.ncols - rank(m)


@given(matrices(), st.integers(0, 2**7 - 1))
def test_solve_agrees_with_column_span(m, s):
    s &= (1 << m.nrows) - 1
    x = solve(m, BitVector(m.nrows, s))
    reachable = {mat_vec(m.rows, v) for v in range(1 << m.ncols)}
    if x is None:
        assert s not in reachable
    else:
        assert mat_vec(m.rows, x.data) == s


@given(matrices())
def test_row_reduce_transform(m):
    rr = row_reduce(m)
    if m.nrows:
        assert multiply(rr.transform, m) == rr.reduced
    assert rr.rank == len(rr.pivots) == rank(m)
    assert span_of(rowspace_basis(m).rows) == span_of(m.rows)


@given(matrices(), matrices())
def test_multiply_matches_numpy(a, b):
    b = BitMatrix.from_ints([r & ((1 << b.ncols) - 1) for r in (list(b.rows) + [0] * a.ncols)[: a.ncols]], b.ncols)
    want = (a.to_numpy().astype(int) @ b.to_numpy().astype(int)) % 2
    assert np.array_equal(multiply(a, b).to_numpy(), want)


@given(matrices())
def test_transpose_is_an_involution(m):
    assert m.transpose().transpose() == m
    assert m.transpose().shape == (m.ncols, m.nrows)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_inverse_of_invertible(n, seed):
    rng = np.random.default_rng(seed)
    m = BitMatrix.from_numpy(rng.integers(0, 2, (n, n)))
    if rank(m) < n:
        with pytest.raises(ValueError):
            inverse(m)
    else:
        assert multiply(m, inverse(m)) == BitMatrix.identity(n)


@given(matrices(max_cols=6), matrices(max_cols=6))
def test_sum_and_intersection_dimensions(a, b):
    w = max(a.ncols, b.ncols)
    a = BitMatrix.from_ints(list(a.rows), w)
    b = BitMatrix.from_ints(list(b.rows), w)
    sa, sb = span_of(a.rows), span_of(b.rows)
    assert span_of(subspace_intersection(a, b).rows) == sa & sb
    assert span_of(subspace_sum(a, b).rows) == span_of(list(a.rows) + list(b.rows))
    ext = complement_basis(a, b)
    assert rank(a) + ext.nrows == rank(subspace_sum(a, b))


@given(matrices(), st.integers(0, 255))
def test_span_membership(m, x):
    x &= (1 << m.ncols) - 1
    s = Span(m.rows)
    assert (x in s) == (x in span_of(m.rows)) == in_rowspace(m, x)
    assert len(s) == rank(m)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=70))
def test_bitvector_round_trips(bits):
    v = BitVector.from_list(bits)
    assert v.to_list() == bits
    assert BitVector.from_str(str(v)) == v
    assert v.weight == sum(bits)


@given(st.lists(st.integers(0, 2**130 - 1), min_size=1, max_size=5))
def test_word_packing_round_trips(values):
    packed = pack_words(values, 130)
    assert [unpack_words(row) for row in packed] == values


def test_shape_errors():
    with pytest.raises(ShapeError):
        multiply(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))
    with pytest.raises(ShapeError):
        BitVector(3, 1) ^ BitVector(4, 1)
    with pytest.raises(ValueError):
        BitMatrix.from_ints([8], 3)


def test_small_known_values():
    m = BitMatrix.from_strings(["110", "011", "101"])
    assert rank(m) == 2
    assert kernel_basis(m).nrows == 1
    assert mat_vec(m.rows, kernel_basis(m).rows[0]) == 0
