"""Toric, planar, and rotated surface codes: local checks, logical operators,
and single-shot check bases (analytic for the torus, via tracked elimination
for every family).

Toric layout convention (forced, see below): plaquettes live at (r, c) with
r increasing downward and both coordinates mod L.  The horizontal qubit
h(r, c) = r*L + c is the top edge of plaquette (r, c); the vertical qubit
v(r, c) = L^2 + r*L + c is its left edge.  Thus

    plaquette(r, c) = {h(r, c), h(r+1, c), v(r, c), v(r, c+1)}
    star(r, c)      = {h(r, c), h(r, c-1), v(r, c), v(r-1, c)}

The analytic single-shot construction composes plaquette columns
(rectangular checks) and full plaquette-column bands wrapping the torus
(circular checks); its geometric convention is not assumed but *validated*:
the constructor verifies that each designated single-qubit error flips
exactly its own check and rejects otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, InvalidParameterError
from .gf2 import BitMatrix, TrackedElimination, invert, mat_mul, mat_vec_mul, rank, row_reduce_tracked

FAMILIES = ("toric", "planar", "rotated")
SIDES = ("Z", "X")


@dataclass(frozen=True, eq=False)
class CssCode:
    """A CSS code instance.

    ``logical_x[i]`` anticommutes with ``logical_z[i]`` and commutes with
    everything else; ``layout`` maps (orientation, row, col) lattice
    coordinates to qubit indices.
    """

    n: int
    k: int
    hx: BitMatrix
    hz: BitMatrix
    logical_x: tuple[np.ndarray, ...]
    logical_z: tuple[np.ndarray, ...]
    family: str
    L: int
    layout: dict


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=False)
class SingleShotBasis:
    """A full-rank single-shot check set.

    ``checks`` is stored in the original qubit order; row i is flipped by
    exactly the single-qubit error on ``designated_qubit[i]``.  The
    ``elimination`` relates the basis to the local check matrix: its
    ``standard_form`` equals ``checks`` with columns permuted
    (designated qubits first), and its inverse transform maps observed
    single-shot syndromes back to local-check syndromes.
    ``kinds[i]`` is one of "rectangular", "circular", "eliminated".
    """

    side: str
    checks: BitMatrix
    elimination: TrackedElimination
    designated_qubit: np.ndarray
    source: str
    kinds: tuple[str, ...]

    def __post_init__(self) -> None:
        self.designated_qubit.setflags(write=False)

    @property
    def n_checks(self) -> int:
        return self.checks.rows


# ---------------------------------------------------------------------------
# code builders
# ---------------------------------------------------------------------------


def _build_toric(L: int) -> CssCode:
    n = 2 * L * L

    def h(r: int, c: int) -> int:
        return (r % L) * L + (c % L)

    def v(r: int, c: int) -> int:
        return L * L + (r % L) * L + (c % L)

    hz = np.zeros((L * L, n), dtype=np.uint8)
    hx = np.zeros((L * L, n), dtype=np.uint8)
    for r in range(L):
        for c in range(L):
            i = r * L + c
            hz[i, [h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)]] = 1
            hx[i, [h(r, c), h(r, c - 1), v(r, c), v(r - 1, c)]] = 1

    lz1 = np.zeros(n, dtype=np.uint8)
    lz1[[h(0, c) for c in range(L)]] = 1
    lz2 = np.zeros(n, dtype=np.uint8)
    lz2[[v(r, 0) for r in range(L)]] = 1
    lx1 = np.zeros(n, dtype=np.uint8)
    lx1[[h(r, 0) for r in range(L)]] = 1
    lx2 = np.zeros(n, dtype=np.uint8)
    lx2[[v(0, c) for c in range(L)]] = 1

    layout = {("h", r, c): h(r, c) for r in range(L) for c in range(L)}
    layout.update({("v", r, c): v(r, c) for r in range(L) for c in range(L)})

    return CssCode(
        n=n,
        k=2,
        hx=BitMatrix.from_dense(hx),
        hz=BitMatrix.from_dense(hz),
        logical_x=(lx1, lx2),
        logical_z=(lz1, lz2),
        family="toric",
        L=L,
        layout=layout,
    )


def _build_planar(d: int) -> CssCode:
    """Hypergraph product of two length-d path repetition codes."""
    n = d * d + (d - 1) * (d - 1)

    def b1(a: int, b: int) -> int:
        return a * d + b

    def b2(a: int, b: int) -> int:
        return d * d + a * (d - 1) + b

    hz = np.zeros((d * (d - 1), n), dtype=np.uint8)
    for i in range(d):
        for j in range(d - 1):
            row = i * (d - 1) + j
            hz[row, [b1(i, j), b1(i, j + 1)]] = 1
            for a in (i - 1, i):
                if 0 <= a < d - 1:
                    hz[row, b2(a, j)] = 1

    hx = np.zeros((d * (d - 1), n), dtype=np.uint8)
    for i in range(d - 1):
        for j in range(d):
            row = i * d + j
            hx[row, [b1(i, j), b1(i + 1, j)]] = 1
            for b in (j - 1, j):
                if 0 <= b < d - 1:
                    hx[row, b2(i, b)] = 1

    lz = np.zeros(n, dtype=np.uint8)
    lz[[b1(a, 0) for a in range(d)]] = 1
    lx = np.zeros(n, dtype=np.uint8)
    lx[[b1(0, b) for b in range(d)]] = 1

    layout = {("b1", a, b): b1(a, b) for a in range(d) for b in range(d)}
    layout.update(
        {("b2", a, b): b2(a, b) for a in range(d - 1) for b in range(d - 1)}
    )

    return CssCode(
        n=n,
        k=1,
        hx=BitMatrix.from_dense(hx),
        hz=BitMatrix.from_dense(hz),
        logical_x=(lx,),
        logical_z=(lz,),
        family="planar",
        L=d,
        layout=layout,
    )


def _build_rotated(d: int) -> CssCode:
    """Rotated surface code on a d x d qubit grid, odd d."""
    n = d * d

    def q(r: int, c: int) -> int:
        return r * d + c

    z_rows = []
    for r in range(-1, d):
        for c in range(d - 1):
            if (r + c) % 2 == 0:
                row = np.zeros(n, dtype=np.uint8)
                for rr in (r, r + 1):
                    if 0 <= rr < d:
                        row[[q(rr, c), q(rr, c + 1)]] = 1
                z_rows.append(row)

    x_rows = []
    for r in range(d - 1):
        for c in range(-1, d):
            if (r + c) % 2 == 1:
                row = np.zeros(n, dtype=np.uint8)
                for cc in (c, c + 1):
                    if 0 <= cc < d:
                        row[[q(r, cc), q(r + 1, cc)]] = 1
                x_rows.append(row)

    lz = np.zeros(n, dtype=np.uint8)
    lz[[q(r, 0) for r in range(d)]] = 1
    lx = np.zeros(n, dtype=np.uint8)
    lx[[q(0, c) for c in range(d)]] = 1

    layout = {("d", r, c): q(r, c) for r in range(d) for c in range(d)}

    return CssCode(
        n=n,
        k=1,
        hx=BitMatrix.from_dense(np.array(x_rows)),
        hz=BitMatrix.from_dense(np.array(z_rows)),
        logical_x=(lx,),
        logical_z=(lz,),
        family="rotated",
        L=d,
        layout=layout,
    )


def build_code(family: str, L: int) -> CssCode:
    """Construct a CSS surface code.

    family: "toric" (n = 2L^2, k = 2), "planar" (hypergraph-product layout,
    n = L^2 + (L-1)^2, k = 1), or "rotated" (n = L^2, k = 1, odd L only).
    """
    if family not in FAMILIES:
        raise InvalidParameterError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if L < 2:
        raise InvalidParameterError(f"lattice size must be at least 2, got {L}")
    if family == "toric":
        return _build_toric(L)
    if family == "planar":
        return _build_planar(L)
    if L % 2 == 0:
        raise InvalidParameterError("rotated surface code requires odd lattice size")
    return _build_rotated(L)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate_css(code: CssCode) -> ValidationReport:
    """Check every CssCode invariant; violations are reported, not raised."""
    bad: list[str] = []

    comm = mat_mul(code.hz, BitMatrix.from_dense(code.hx.to_dense().T)).to_dense()
    for i, j in zip(*np.nonzero(comm)):
        bad.append(f"hz row {i} anticommutes with hx row {j}")
        if len(bad) >= 10:
            bad.append("... further commutation violations suppressed")
            break

    if len(code.logical_x) != code.k or len(code.logical_z) != code.k:
        bad.append(
            f"expected {code.k} logical pairs, got "
            f"{len(code.logical_x)} X / {len(code.logical_z)} Z"
        )

    for name, ops, H in (
        ("logical_x", code.logical_x, code.hz),
        ("logical_z", code.logical_z, code.hx),
    ):
        for i, op in enumerate(ops):
            if op.shape != (code.n,):
                bad.append(f"{name}[{i}] has length {op.shape}, want {code.n}")
                continue
            s = mat_vec_mul(H, op)
            if s.any():
                bad.append(
                    f"{name}[{i}] anticommutes with check rows {np.flatnonzero(s).tolist()}"
                )

    for i, lx in enumerate(code.logical_x):
        for j, lz in enumerate(code.logical_z):
            parity = int(np.bitwise_and(lx, lz).sum() & 1)
            if parity != (1 if i == j else 0):
                bad.append(f"logical_x[{i}] / logical_z[{j}] overlap parity {parity}")

    k_rank = code.n - rank(code.hx) - rank(code.hz)
    if k_rank != code.k:
        bad.append(f"n - rank(hx) - rank(hz) = {k_rank}, but k = {code.k}")

    if code.family == "toric":
        if code.n != 2 * code.L**2:
            bad.append(f"toric qubit count {code.n} != 2L^2")
        for name, H in (("hz", code.hz), ("hx", code.hx)):
            w = H.row_weights()
            off = np.flatnonzero(w != 4)
            if off.size:
                bad.append(f"toric {name} rows {off.tolist()} have weight != 4")
    else:
        if rank(code.hz) != code.hz.rows:
            bad.append(f"{code.family} hz is not full rank")
        if rank(code.hx) != code.hx.rows:
            bad.append(f"{code.family} hx is not full rank")

    return ValidationReport(tuple(bad))


# ---------------------------------------------------------------------------
# single-shot bases
# ---------------------------------------------------------------------------


def _verify_single_flip(checks: BitMatrix, designated: np.ndarray, what: str) -> None:
    """Reject any basis whose designated errors do not flip exactly their own check."""
    if len(set(designated.tolist())) != len(designated):
        raise ContractViolationError(f"{what}: designated qubits are not distinct")
    sub = checks.to_dense()[:, designated]
    if not np.array_equal(sub, np.eye(checks.rows, dtype=np.uint8)):
        raise ContractViolationError(
            f"{what}: single-flip property failed; the lattice convention is wrong"
        )


def _toric_composition(L: int) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Composition matrix C over plaquettes, designated qubits, and row kinds
    for the Z-side analytic toric basis.

    Rectangular check R(i, j) (i = 0..L-2, j = 0..L-1) is the product of
    plaquettes (k, j) for k = i..L-2; its designated qubit is the horizontal
    edge above plaquette (i, j).  Circular check S(i) (i = 0..L-2) is the
    product of the full plaquette columns i..L-2, wrapping the torus; its
    designated qubit is the vertical edge left of plaquette (L-1, i).
    """
    m = L * L
    n_checks = m - 1
    comp = np.zeros((n_checks, m), dtype=np.uint8)
    designated = np.zeros(n_checks, dtype=np.int64)
    kinds: list[str] = []
    for i in range(L - 1):
        for j in range(L):
            row = i * L + j
            comp[row, [k * L + j for k in range(i, L - 1)]] = 1
            designated[row] = i * L + j  # h(i, j)
            kinds.append("rectangular")
    for i in range(L - 1):
        row = (L - 1) * L + i
        comp[row, [r * L + mcol for r in range(L) for mcol in range(i, L - 1)]] = 1
        designated[row] = L * L + (L - 1) * L + i  # v(L-1, i)
        kinds.append("circular")
    return comp, designated, kinds


def _analytic_elimination(
    comp: np.ndarray, local: BitMatrix, checks: BitMatrix, designated: np.ndarray
) -> TrackedElimination:
    """Package an analytic composition as a TrackedElimination.

    The transform stacks the composition rows over the all-plaquettes row
    (which annihilates the local matrix on the torus), so T . H_local equals
    [checks ; 0] and the tracked-elimination invariants hold with the
    designated qubits as pivot columns.
    """
    m0 = local.rows
    t = np.vstack([comp, np.ones((1, m0), dtype=np.uint8)])
    transform = BitMatrix.from_dense(t)
    inverse = invert(transform)  # raises if the composition is not invertible

    n = local.cols
    rest = np.setdiff1d(np.arange(n), designated)
    perm = np.concatenate([designated, rest])
    standard = BitMatrix.from_dense(checks.to_dense()[:, perm])

    elim = TrackedElimination(
        transform=transform,
        inverse=inverse,
        column_perm=perm,
        standard_form=standard,
        rank=checks.rows,
        dropped_rows=(m0 - 1,),
    )
    # paranoia: T . H_local must reproduce the checks exactly (and a zero row)
    th = mat_mul(transform, local).to_dense()
    if not (np.array_equal(th[:-1], checks.to_dense()) and not th[-1].any()):
        raise ContractViolationError("analytic composition does not match the local checks")
    return elim


def analytic_toric_single_shot(L: int, side: str = "Z") -> SingleShotBasis:
    """Closed-form single-shot basis for the toric code.

    Returns (L-1)*L rectangular plus (L-1) circular checks, L^2 - 1 rows in
    total.  The X side is the lattice-duality image of the Z side
    (h(r,c) -> v(r, c+1), v(r,c) -> h(r+1, c), plaquettes -> stars), not a
    second derivation.  The single-flip property is machine-checked at build
    time; failure raises instead of returning a broken basis.
    """
    if L < 2:
        raise InvalidParameterError(f"lattice size must be at least 2, got {L}")
    if side not in SIDES:
        raise InvalidParameterError(f"side must be one of {SIDES}")

    code = build_code("toric", L)
    comp, designated, kinds = _toric_composition(L)
    checks = mat_mul(BitMatrix.from_dense(comp), code.hz)

    if side == "X":
        n = code.n
        tau = np.zeros(n, dtype=np.int64)
        for r in range(L):
            for c in range(L):
                tau[r * L + c] = L * L + r * L + (c + 1) % L  # h -> v
                tau[L * L + r * L + c] = ((r + 1) % L) * L + c  # v -> h
        sigma = np.zeros(L * L, dtype=np.int64)
        for r in range(L):
            for c in range(L):
                sigma[r * L + c] = ((r + 1) % L) * L + (c + 1) % L
        dense = checks.to_dense()
        dual = np.zeros_like(dense)
        dual[:, tau] = dense
        comp_x = np.zeros_like(comp)
        comp_x[:, sigma] = comp
        checks = BitMatrix.from_dense(dual)
        comp = comp_x
        designated = tau[designated]
        local = code.hx
    else:
        local = code.hz

    _verify_single_flip(checks, designated, f"analytic toric L={L} side={side}")
    elim = _analytic_elimination(comp, local, checks, designated)
    return SingleShotBasis(
        side=side,
        checks=checks,
        elimination=elim,
        designated_qubit=designated,
        source="analytic",
        kinds=tuple(kinds),
    )


def derive_single_shot_basis(code: CssCode, side: str = "Z") -> SingleShotBasis:
    """Single-shot basis for any CSS code via tracked Gaussian elimination.

    The standard form [I | A] of the local check matrix makes the qubit
    owning pivot column i the designated error of check i.  ``checks`` is
    the standard form with columns returned to the original qubit order.
    """
    if side not in SIDES:
        raise InvalidParameterError(f"side must be one of {SIDES}")
    local = code.hz if side == "Z" else code.hx
    elim = row_reduce_tracked(local)
    inv_perm = np.empty(code.n, dtype=np.int64)
    inv_perm[elim.column_perm] = np.arange(code.n)
    checks = BitMatrix.from_dense(elim.standard_form.to_dense()[:, inv_perm])
    designated = elim.column_perm[: elim.rank].astype(np.int64).copy()
    _verify_single_flip(checks, designated, f"eliminated {code.family} L={code.L} side={side}")
    return SingleShotBasis(
        side=side,
        checks=checks,
        elimination=elim,
        designated_qubit=designated,
        source="eliminated",
        kinds=("eliminated",) * elim.rank,
    )
