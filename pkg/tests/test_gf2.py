"""GF(2) linear algebra: packing, rank, products, tracked elimination."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ssqec.errors import ContractViolationError
from ssqec.gf2 import (
    BitMatrix,
    invert,
    mat_mul,
    mat_vec_mul,
    rank,
    row_reduce_tracked,
)

bit_matrices = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 80).flatmap(
        lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1))
    )
)


@given(bit_matrices)
def test_pack_unpack_roundtrip(dense):
    m = BitMatrix.from_dense(dense)
    assert np.array_equal(m.to_dense(), dense)
    assert m.rows, m.cols == dense.shape


@given(bit_matrices)
def test_row_support_and_weights_match_dense(dense):
    m = BitMatrix.from_dense(dense)
    assert np.array_equal(m.row_weights(), dense.sum(axis=1))
    for i in range(m.rows):
        assert np.array_equal(m.row_support(i), np.flatnonzero(dense[i]))


def test_identity_rank_and_inverse():
    eye = BitMatrix.identity(7)
    assert rank(eye) == 7
    assert invert(eye) == eye


def test_rank_of_dependent_rows():
    # Third row is the XOR of the first two, so the rank drops to 2.
    m = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    assert rank(m) == 2


@given(bit_matrices)
def test_rank_matches_galois_field_elimination_oracle(dense):
    # Oracle: dense fraction-free elimination over GF(2) in plain numpy.
    a = dense.copy().astype(np.uint8)
    r = 0
    for c in range(a.shape[1]):
        rows = np.flatnonzero(a[r:, c])
        if rows.size == 0:
            continue
        a[[r, r + rows[0]]] = a[[r + rows[0], r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == a.shape[0]:
            break
    assert rank(BitMatrix.from_dense(dense)) == r


@given(bit_matrices, st.data())
def test_mat_vec_matches_dense_mod2(dense, data):
    v = np.array(
        data.draw(
            st.lists(
                st.integers(0, 1),
                min_size=dense.shape[1],
                max_size=dense.shape[1],
            )
        ),
        dtype=np.uint8,
    )
    m = BitMatrix.from_dense(dense)
    assert np.array_equal(mat_vec_mul(m, v), (dense @ v) % 2)


@settings(max_examples=40)
@given(
    st.integers(1, 6),
    st.integers(1, 6),
    st.integers(1, 6),
    st.randoms(use_true_random=False),
)
def test_mat_mul_matches_dense_mod2(m, k, n, rnd):
    a = np.array([[rnd.randint(0, 1) for _ in range(k)] for _ in range(m)], dtype=np.uint8)
    b = np.array([[rnd.randint(0, 1) for _ in range(n)] for _ in range(k)], dtype=np.uint8)
    got = mat_mul(BitMatrix.from_dense(a), BitMatrix.from_dense(b))
    assert np.array_equal(got.to_dense(), (a @ b) % 2)


def test_mat_vec_rejects_wrong_length():
    m = BitMatrix.from_dense([[1, 0, 1]])
    with pytest.raises(ContractViolationError):
        mat_vec_mul(m, np.zeros(4, dtype=np.uint8))


def test_invert_rejects_singular():
    with pytest.raises(ContractViolationError):
        invert(BitMatrix.from_dense([[1, 1], [1, 1]]))


@settings(max_examples=30)
@given(st.integers(2, 8), st.randoms(use_true_random=False))
def test_invert_roundtrip_on_random_invertible(n, rnd):
    # Build an invertible matrix as a product of random elementary row ops.
    a = np.eye(n, dtype=np.uint8)
    for _ in range(4 * n):
        i, j = rnd.sample(range(n), 2)
        a[i] ^= a[j]
    m = BitMatrix.from_dense(a)
    assert mat_mul(m, invert(m)) == BitMatrix.identity(n)


@given(bit_matrices)
def test_row_reduce_tracked_reconstruction(dense):
    """T.H with columns permuted equals [standard_form; zeros], T invertible."""
    h = BitMatrix.from_dense(dense)
    elim = row_reduce_tracked(h)
    th = mat_mul(elim.transform, h).to_dense()[:, elim.column_perm]
    r = elim.rank
    assert np.array_equal(th[:r], elim.standard_form.to_dense())
    assert not th[r:].any()
    assert len(elim.dropped_rows) == h.rows - r
    # leading r columns of the standard form are the identity
    assert np.array_equal(
        elim.standard_form.to_dense()[:, :r], np.eye(r, dtype=np.uint8)
    )
    # transform really is invertible, and inverse is its inverse
    assert mat_mul(elim.transform, elim.inverse) == BitMatrix.identity(h.rows)


@given(bit_matrices)
def test_row_reduce_preserves_row_space(dense):
    h = BitMatrix.from_dense(dense)
    elim = row_reduce_tracked(h)
    sf = elim.standard_form.to_dense()
    # un-permute the standard form back to original column order
    unperm = np.empty_like(sf)
    unperm[:, elim.column_perm] = sf
    stacked = np.vstack([dense, unperm])
    assert rank(BitMatrix.from_dense(stacked)) == elim.rank == rank(h)
