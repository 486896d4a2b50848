"""Code construction: CSS validity, logical operators, single-shot bases."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssqec.codes import (
    analytic_toric_single_shot,
    build_code,
    derive_single_shot_basis,
    validate_css,
)
from ssqec.errors import InvalidParameterError
from ssqec.gf2 import BitMatrix, mat_vec_mul, rank

FAMILIES = [("toric", [2, 3, 4, 5, 7]), ("planar", [2, 3, 4, 5]), ("rotated", [3, 5, 7])]


@pytest.mark.parametrize("family,sizes", FAMILIES)
def test_families_are_valid_css_codes(family, sizes):
    for L in sizes:
        code = build_code(family, L)
        report = validate_css(code)
        assert report.ok, report


def test_toric_parameters():
    # n = 2L^2 qubits on edges, k = 2 logical qubits, L^2 checks per side.
    for L in (2, 3, 5):
        code = build_code("toric", L)
        assert code.n == 2 * L * L
        assert code.k == 2
        assert code.hz.rows == L * L
        assert code.hx.rows == L * L
        assert rank(code.hz) == L * L - 1
        # every plaquette and star touches exactly 4 edges
        assert (code.hz.row_weights() == 4).all()
        assert (code.hx.row_weights() == 4).all()


def test_planar_parameters():
    for d in (2, 3, 4):
        code = build_code("planar", d)
        assert code.n == d * d + (d - 1) * (d - 1)
        assert code.k == 1


def test_rotated_parameters():
    for d in (3, 5, 7):
        code = build_code("rotated", d)
        assert code.n == d * d
        assert code.k == 1
        assert code.hz.rows == (d * d - 1) // 2
        assert code.hx.rows == (d * d - 1) // 2


def test_rotated_requires_odd_size():
    with pytest.raises(InvalidParameterError):
        build_code("rotated", 4)


def test_unknown_family_rejected():
    with pytest.raises(InvalidParameterError):
        build_code("hyperbolic", 3)


@pytest.mark.parametrize("family,sizes", FAMILIES)
def test_logical_operators_commute_and_pair(family, sizes):
    code = build_code(family, sizes[-1])
    for lx in code.logical_x:
        assert not mat_vec_mul(code.hz, lx).any()
    for lz in code.logical_z:
        assert not mat_vec_mul(code.hx, lz).any()
    # symplectic pairing: <lx_i, lz_j> = delta_ij
    pair = np.array(
        [[int(np.count_nonzero(lx & lz) % 2) for lz in code.logical_z]
         for lx in code.logical_x]
    )
    assert np.array_equal(pair, np.eye(code.k, dtype=int))


def test_toric_logical_weights_equal_l():
    code = build_code("toric", 5)
    for v in code.logical_x + code.logical_z:
        assert int((v != 0).sum()) == 5


def _row_space_equal(a: BitMatrix, b: BitMatrix) -> bool:
    stacked = BitMatrix.from_dense(np.vstack([a.to_dense(), b.to_dense()]))
    return rank(stacked) == rank(a) == rank(b)


@pytest.mark.parametrize("side", ["Z", "X"])
@pytest.mark.parametrize("L", [2, 3, 4, 5, 6])
def test_analytic_basis_structure(L, side):
    basis = analytic_toric_single_shot(L, side=side)
    code = build_code("toric", L)
    local = code.hz if side == "Z" else code.hx
    assert basis.n_checks == L * L - 1
    kinds = list(basis.kinds)
    assert kinds.count("rectangular") == (L - 1) * L
    assert kinds.count("circular") == L - 1
    assert _row_space_equal(basis.checks, local)
    # single-flip property: the designated qubit of row i flips row i only
    n = basis.checks.cols
    for i, q in enumerate(basis.designated_qubit):
        e = np.zeros(n, dtype=np.uint8)
        e[q] = 1
        syn = mat_vec_mul(basis.checks, e)
        expected = np.zeros(basis.n_checks, dtype=np.uint8)
        expected[i] = 1
        assert np.array_equal(syn, expected)


@pytest.mark.parametrize("family,L", [("toric", 4), ("planar", 3), ("planar", 4), ("rotated", 3), ("rotated", 5)])
@pytest.mark.parametrize("side", ["Z", "X"])
def test_derived_basis_structure(family, L, side):
    code = build_code(family, L)
    basis = derive_single_shot_basis(code, side=side)
    local = code.hz if side == "Z" else code.hx
    assert basis.n_checks == rank(local)
    assert basis.source == "eliminated"
    assert _row_space_equal(basis.checks, local)
    n = basis.checks.cols
    for i, q in enumerate(basis.designated_qubit):
        e = np.zeros(n, dtype=np.uint8)
        e[q] = 1
        syn = mat_vec_mul(basis.checks, e)
        assert syn[i] == 1 and syn.sum() == 1


def test_designated_qubits_are_distinct():
    for L in (3, 5):
        basis = analytic_toric_single_shot(L)
        assert len(set(basis.designated_qubit.tolist())) == basis.n_checks


def test_analytic_l2_minimal_case():
    # Smallest torus: 8 qubits, 3 independent checks per side.
    basis = analytic_toric_single_shot(2)
    assert basis.n_checks == 3
    assert list(basis.kinds) == ["rectangular", "rectangular", "circular"]


def test_elimination_maps_observed_back_to_local():
    """inverse transform of the tracked elimination recovers local syndromes."""
    L = 3
    code = build_code("toric", L)
    basis = analytic_toric_single_shot(L)
    rng = np.random.default_rng(0)
    for _ in range(20):
        e = (rng.random(code.n) < 0.2).astype(np.uint8)
        observed = mat_vec_mul(basis.checks, e)
        padded = np.concatenate(
            [observed, np.zeros(code.hz.rows - basis.n_checks, dtype=np.uint8)]
        )
        local = mat_vec_mul(basis.elimination.inverse, padded)
        assert np.array_equal(local, mat_vec_mul(code.hz, e))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.sampled_from(["Z", "X"]))
def test_analytic_weights_grow_linearly(L, side):
    # Rectangular check supports span whole columns: max weight scales with L,
    # the price paid for the single-flip property.
    basis = analytic_toric_single_shot(L, side=side)
    assert int(basis.checks.row_weights().max()) >= 2 * (L - 1) or L == 2
