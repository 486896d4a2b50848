"""Dense GF(2) linear algebra with invertible-row-transform tracking.

Matrices are stored bit-packed, 64 columns per word, little-endian bit order
within each word.  Everything here is a pure function of its inputs; all
returned objects are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

_WORD = 64


def _n_words(cols: int) -> int:
    return max(1, (cols + _WORD - 1) // _WORD)


def _pack(dense: np.ndarray, cols: int) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, words) uint64."""
    rows = dense.shape[0]
    nbytes = _n_words(cols) * 8
    out8 = np.zeros((rows, nbytes), dtype=np.uint8)
    if cols:
        raw = np.packbits(dense.astype(np.uint8), axis=1, bitorder="little")
        out8[:, : raw.shape[1]] = raw
    return out8.view(np.uint64)


def _unpack(bits: np.ndarray, cols: int) -> np.ndarray:
    out = np.unpackbits(bits.view(np.uint8), axis=1, bitorder="little")
    return np.ascontiguousarray(out[:, :cols])


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Bit-packed dense matrix over GF(2).

    Bit (i, j) lives at word ``j // 64``, bit ``j % 64`` of row i.  Padding
    bits past ``cols`` are always zero, so word-wise XOR and popcount are
    safe without masking.
    """

    rows: int
    cols: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.bits.shape != (self.rows, _n_words(self.cols)):
            raise ContractViolationError(
                f"bits shape {self.bits.shape} does not match "
                f"{self.rows}x{self.cols} matrix"
            )
        self.bits.setflags(write=False)

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.atleast_2d(np.asarray(dense))
        rows, cols = dense.shape
        return cls(rows, cols, _pack(dense.astype(np.uint8) & 1, cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.bits, self.cols)

    def row_support(self, i: int) -> np.ndarray:
        """Sorted qubit indices set in row i."""
        return np.flatnonzero(_unpack(self.bits[i : i + 1], self.cols)[0])

    def row_weights(self) -> np.ndarray:
        return np.bitwise_count(self.bits).sum(axis=1).astype(np.int64)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.bits, other.bits)
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"BitMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True, eq=False)
class TrackedElimination:
    """Result of tracked Gaussian elimination of an m0 x n matrix H.

    ``transform`` (T, m0 x m0, invertible) and ``column_perm`` satisfy

        (T . H)[:, column_perm] == [standard_form ; 0-rows]

    where the zero rows correspond to ``dropped_rows`` (original indices of
    rows that reduced to zero) and ``standard_form`` is r x n with its first
    r permuted columns equal to the identity.  ``inverse`` is T^-1 over GF(2).
    """

    transform: BitMatrix
    inverse: BitMatrix
    column_perm: np.ndarray
    standard_form: BitMatrix
    rank: int
    dropped_rows: tuple[int, ...]

    def __post_init__(self) -> None:
        self.column_perm.setflags(write=False)


def mat_vec_mul(M: BitMatrix, v: np.ndarray) -> np.ndarray:
    """Syndrome-style product: out[i] = parity(row_i AND v), as uint8."""
    v = np.asarray(v, dtype=np.uint8)
    if v.shape != (M.cols,):
        raise ContractViolationError(
            f"vector length {v.shape} does not match {M.cols} columns"
        )
    vw = _pack(v[None, :] & 1, M.cols)[0]
    acc = np.bitwise_count(M.bits & vw[None, :]).sum(axis=1)
    return (acc & 1).astype(np.uint8)


def mat_mul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    """GF(2) matrix product A . B."""
    if A.cols != B.rows:
        raise ContractViolationError(
            f"inner dimensions {A.cols} and {B.rows} do not match"
        )
    bt = _pack(np.ascontiguousarray(B.to_dense().T), B.rows)
    acc = np.bitwise_count(A.bits[:, None, :] & bt[None, :, :]).sum(axis=2)
    return BitMatrix.from_dense((acc & 1).astype(np.uint8))


def rank(M: BitMatrix) -> int:
    """GF(2) rank by in-place packed elimination."""
    A = M.bits.copy()
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        w, b = divmod(c, _WORD)
        mask = np.uint64(1 << b)
        hits = np.flatnonzero(A[r:, w] & mask)
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        below = np.flatnonzero(A[r + 1 :, w] & mask)
        if below.size:
            A[r + 1 :][below] ^= A[r]
        r += 1
    return r


def invert(M: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible GF(2) matrix."""
    if M.rows != M.cols:
        raise ContractViolationError("only square matrices can be inverted")
    n = M.rows
    a = M.to_dense()
    inv = np.eye(n, dtype=np.uint8)
    for c in range(n):
        hits = np.flatnonzero(a[c:, c])
        if hits.size == 0:
            raise ContractViolationError("matrix is singular over GF(2)")
        p = c + hits[0]
        if p != c:
            a[[c, p]] = a[[p, c]]
            inv[[c, p]] = inv[[p, c]]
        others = np.flatnonzero(a[:, c])
        others = others[others != c]
        if others.size:
            a[others] ^= a[c]
            inv[others] ^= inv[c]
    return BitMatrix.from_dense(inv)


def row_reduce_tracked(H: BitMatrix) -> TrackedElimination:
    """Reduced row echelon form with T / T^-1 / column-permutation tracking.

    Columns are scanned left to right in the natural qubit order; a column
    swap is recorded only when the current position has no pivot among the
    remaining rows, which keeps the output deterministic.  Redundant rows
    (reduced to zero) are dropped from ``standard_form`` and reported via
    ``dropped_rows`` by their original index.
    """
    m0, n = H.rows, H.cols
    a = H.to_dense()
    t = np.eye(m0, dtype=np.uint8)
    perm = np.arange(n)
    row_origin = np.arange(m0)
    r = 0
    while r < m0:
        pivot_pos = -1
        pivot_row = -1
        for pos in range(r, n):
            hits = np.flatnonzero(a[r:, perm[pos]])
            if hits.size:
                pivot_pos = pos
                pivot_row = r + hits[0]
                break
        if pivot_pos < 0:
            break
        if pivot_pos != r:
            perm[[r, pivot_pos]] = perm[[pivot_pos, r]]
        if pivot_row != r:
            a[[r, pivot_row]] = a[[pivot_row, r]]
            t[[r, pivot_row]] = t[[pivot_row, r]]
            row_origin[[r, pivot_row]] = row_origin[[pivot_row, r]]
        col = perm[r]
        others = np.flatnonzero(a[:, col])
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
            t[others] ^= t[r]
        r += 1

    transform = BitMatrix.from_dense(t)
    return TrackedElimination(
        transform=transform,
        inverse=invert(transform),
        column_perm=perm,
        standard_form=BitMatrix.from_dense(a[:r][:, perm]),
        rank=r,
        dropped_rows=tuple(sorted(int(i) for i in row_origin[r:])),
    )
