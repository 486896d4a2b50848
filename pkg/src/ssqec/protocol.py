"""Full error-correction trials.

A single-shot trial runs N noisy correction rounds (sample noise, measure
the configured check set on the accumulated error frame, decode, correct)
followed by one final round with fresh data noise and noiseless syndromes;
failure is judged only after that final round.  A repeated trial instead
accumulates d rounds of noisy local syndromes and decodes them in one
space-time matching.  Both judge failure by the overlap parity of the
residual frame with the logical operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .codes import (
    CssCode,
    SingleShotBasis,
    analytic_toric_single_shot,
    derive_single_shot_basis,
)
from .decode import (
    MatchingGraph,
    SpaceTimeGraph,
    build_matching_graph,
    decode_repeated_rounds,
    decode_single_shot_round,
    mwpm_match,
    parity_repair,
)
from .errors import (
    ContractViolationError,
    InvalidParameterError,
    UnsupportedSizeError,
)
from .gf2 import BitMatrix, mat_vec_mul, row_reduce_tracked
from .noise import (
    PauliFrame,
    PhenomenologicalParams,
    RoundSample,
    ZxParams,
    sample_phenomenological_round,
    sample_zx_round,
)

REDUCED_WEIGHT_RANK_CAP = 26


class CheckScheme(str, Enum):
    LOCAL_REPEATED = "local_repeated"
    LOCAL_SINGLE_SHOT = "local_single_shot"
    SINGLE_SHOT_ANALYTIC = "single_shot_analytic"
    SINGLE_SHOT_ELIMINATED = "single_shot_eliminated"


SINGLE_SHOT_SCHEMES = (
    CheckScheme.LOCAL_SINGLE_SHOT,
    CheckScheme.SINGLE_SHOT_ANALYTIC,
    CheckScheme.SINGLE_SHOT_ELIMINATED,
)


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial needs; identical configs reproduce identical
    outcomes (the seed fully determines the noise stream)."""

    code: CssCode
    check_scheme: CheckScheme
    noise: PhenomenologicalParams | ZxParams
    rounds: int
    seed: int = 0
    sides: str = "Z"

    def __post_init__(self) -> None:
        if not isinstance(self.check_scheme, CheckScheme):
            object.__setattr__(
                self, "check_scheme", CheckScheme(str(self.check_scheme))
            )
        if self.rounds < 0:
            raise InvalidParameterError(f"rounds must be >= 0: {self.rounds}")
        if self.sides not in ("Z", "both"):
            raise InvalidParameterError(
                f'sides must be "Z" or "both", got {self.sides!r}'
            )
        if isinstance(self.noise, PhenomenologicalParams) and self.sides != "Z":
            raise InvalidParameterError(
                "the phenomenological model corrects bit-flips only; "
                'use sides="Z"'
            )


@dataclass(frozen=True)
class TrialOutcome:
    failure_x: bool
    failure_z: bool
    residual_weight: int
    residual_reduced_weight: int | None
    rounds_executed: int

    @property
    def failed(self) -> bool:
        return self.failure_x or self.failure_z


@dataclass
class _Context:
    """Read-only per-(code, scheme, sides) decoding machinery, shared by
    every trial of a sweep point."""

    graph_z: MatchingGraph
    graph_x: MatchingGraph | None
    basis_z: SingleShotBasis | None
    basis_x: SingleShotBasis | None
    checks_z: BitMatrix
    checks_x: BitMatrix | None


_context_cache: dict[tuple[int, str, str], _Context] = {}
_context_keepalive: list[CssCode] = []


def _build_context(cfg: TrialConfig) -> _Context:
    key = (id(cfg.code), cfg.check_scheme.value, cfg.sides)
    ctx = _context_cache.get(key)
    if ctx is not None:
        return ctx
    code = cfg.code
    scheme = cfg.check_scheme
    both = cfg.sides == "both"
    graph_z = build_matching_graph(code.hz)
    graph_x = build_matching_graph(code.hx) if both else None
    basis_z = basis_x = None
    if scheme is CheckScheme.SINGLE_SHOT_ANALYTIC:
        if code.family != "toric":
            raise InvalidParameterError(
                "the analytic single-shot construction exists for the toric "
                f"family only, not {code.family!r}"
            )
        basis_z = analytic_toric_single_shot(code.L, "Z")
        basis_x = analytic_toric_single_shot(code.L, "X") if both else None
    elif scheme is CheckScheme.SINGLE_SHOT_ELIMINATED:
        basis_z = derive_single_shot_basis(code, "Z")
        basis_x = derive_single_shot_basis(code, "X") if both else None
    checks_z = basis_z.checks if basis_z is not None else code.hz
    checks_x = (
        (basis_x.checks if basis_x is not None else code.hx) if both else None
    )
    ctx = _Context(
        graph_z=graph_z,
        graph_x=graph_x,
        basis_z=basis_z,
        basis_x=basis_x,
        checks_z=checks_z,
        checks_x=checks_x,
    )
    _context_cache[key] = ctx
    _context_keepalive.append(code)
    return ctx


def _rng_for(cfg: TrialConfig, rng: np.random.Generator | None):
    return np.random.default_rng(cfg.seed) if rng is None else rng


def _final_data_noise(
    noise: PhenomenologicalParams | ZxParams, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray | None]:
    """Fresh data noise of the final (noiseless-syndrome) round."""
    if isinstance(noise, PhenomenologicalParams):
        return (rng.random(n) < noise.p).astype(np.uint8), None
    pg = float(noise.p_g)
    r = rng.random(n)
    dx = (r < 2.0 * pg / 3.0).astype(np.uint8)
    dz = ((r >= pg / 3.0) & (r < pg)).astype(np.uint8)
    return dx, dz


def _correction_from_noisy(
    ctx: _Context,
    scheme: CheckScheme,
    side: str,
    observed: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Decode one noisy observed syndrome on the given side."""
    graph = ctx.graph_z if side == "Z" else ctx.graph_x
    basis = ctx.basis_z if side == "Z" else ctx.basis_x
    assert graph is not None
    if scheme is CheckScheme.LOCAL_SINGLE_SHOT:
        if graph.boundary is None:
            observed = parity_repair(observed, rng)
        faults = mwpm_match(graph, np.flatnonzero(observed))
        correction = np.zeros(graph.n_qubits, dtype=np.uint8)
        correction[faults] = 1
        return correction
    assert basis is not None
    return decode_single_shot_round(basis, graph, observed)


def _perfect_decode(
    graph: MatchingGraph, H_local: BitMatrix, err: np.ndarray
) -> np.ndarray:
    """Noiseless-syndrome decode of one side's error bits."""
    syndrome = mat_vec_mul(H_local, err)
    faults = mwpm_match(graph, np.flatnonzero(syndrome))
    correction = np.zeros(graph.n_qubits, dtype=np.uint8)
    correction[faults] = 1
    return correction


def _sample_round(
    cfg: TrialConfig, ctx: _Context, rng: np.random.Generator
) -> RoundSample:
    if isinstance(cfg.noise, PhenomenologicalParams):
        return sample_phenomenological_round(
            cfg.code.n, ctx.checks_z.rows, cfg.noise, rng
        )
    assert ctx.checks_x is not None, 'the ZX model needs sides="both"'
    return sample_zx_round(cfg.code, ctx.checks_z, ctx.checks_x, cfg.noise, rng)


def _finish_trial(
    cfg: TrialConfig,
    ctx: _Context,
    frame: PauliFrame,
    rng: np.random.Generator,
    rounds_executed: int,
    compute_reduced_weight: bool,
) -> TrialOutcome:
    """Final round: fresh data noise, noiseless syndromes, decode, judge."""
    code = cfg.code
    dx, dz = _final_data_noise(cfg.noise, code.n, rng)
    frame.x_errors ^= dx
    if dz is not None:
        frame.z_errors ^= dz
    frame.x_errors ^= _perfect_decode(ctx.graph_z, code.hz, frame.x_errors)
    if cfg.sides == "both":
        assert ctx.graph_x is not None
        frame.z_errors ^= _perfect_decode(ctx.graph_x, code.hx, frame.z_errors)
    if int(mat_vec_mul(code.hz, frame.x_errors).sum()) != 0:
        raise ContractViolationError(
            "frame has nonzero Z-side syndrome after the noiseless round"
        )
    failure_x, failure_z = logical_failure(code, frame)
    reduced: int | None = None
    if compute_reduced_weight:
        reduced = reduced_weight(code, frame.x_errors, pauli="X")
        if cfg.sides == "both":
            reduced = max(
                reduced, reduced_weight(code, frame.z_errors, pauli="Z")
            )
    return TrialOutcome(
        failure_x=failure_x,
        failure_z=failure_z,
        residual_weight=frame.weight,
        residual_reduced_weight=reduced,
        rounds_executed=rounds_executed,
    )


def run_single_shot_trial(
    cfg: TrialConfig,
    rng: np.random.Generator | None = None,
    compute_reduced_weight: bool = False,
) -> TrialOutcome:
    """Run N noisy single-shot rounds plus the final noiseless round."""
    if cfg.check_scheme not in SINGLE_SHOT_SCHEMES:
        raise InvalidParameterError(
            f"{cfg.check_scheme.value} is not a single-shot scheme"
        )
    rng = _rng_for(cfg, rng)
    ctx = _build_context(cfg)
    code = cfg.code
    scheme = cfg.check_scheme
    frame = PauliFrame.zeros(code.n)
    for _ in range(cfg.rounds):
        sample = _sample_round(cfg, ctx, rng)
        if sample.data_x is not None:
            frame.x_errors ^= sample.data_x
        if sample.data_z is not None:
            frame.z_errors ^= sample.data_z
        assert sample.meas_z is not None
        observed = mat_vec_mul(ctx.checks_z, frame.x_errors) ^ sample.meas_z
        frame.x_errors ^= _correction_from_noisy(
            ctx, scheme, "Z", observed, rng
        )
        if cfg.sides == "both":
            assert ctx.checks_x is not None and sample.meas_x is not None
            observed = mat_vec_mul(ctx.checks_x, frame.z_errors) ^ sample.meas_x
            frame.z_errors ^= _correction_from_noisy(
                ctx, scheme, "X", observed, rng
            )
    return _finish_trial(
        cfg, ctx, frame, rng, cfg.rounds, compute_reduced_weight
    )


def run_repeated_trial(
    cfg: TrialConfig,
    rng: np.random.Generator | None = None,
    compute_reduced_weight: bool = False,
) -> TrialOutcome:
    """Accumulate d rounds of noisy local syndromes, then decode once in
    space-time after a final noiseless round."""
    if cfg.check_scheme is not CheckScheme.LOCAL_REPEATED:
        raise InvalidParameterError(
            f"run_repeated_trial needs local_repeated, got "
            f"{cfg.check_scheme.value}"
        )
    rng = _rng_for(cfg, rng)
    ctx = _build_context(cfg)
    code = cfg.code
    d = cfg.rounds
    frame = PauliFrame.zeros(code.n)
    syn_z = np.zeros((d + 1, code.hz.rows), dtype=np.uint8)
    syn_x = (
        np.zeros((d + 1, code.hx.rows), dtype=np.uint8)
        if cfg.sides == "both"
        else None
    )
    for t in range(d):
        sample = _sample_round(cfg, ctx, rng)
        if sample.data_x is not None:
            frame.x_errors ^= sample.data_x
        if sample.data_z is not None:
            frame.z_errors ^= sample.data_z
        assert sample.meas_z is not None
        syn_z[t] = mat_vec_mul(code.hz, frame.x_errors) ^ sample.meas_z
        if syn_x is not None:
            assert sample.meas_x is not None
            syn_x[t] = mat_vec_mul(code.hx, frame.z_errors) ^ sample.meas_x
    dx, dz = _final_data_noise(cfg.noise, code.n, rng)
    frame.x_errors ^= dx
    if dz is not None:
        frame.z_errors ^= dz
    syn_z[d] = mat_vec_mul(code.hz, frame.x_errors)
    frame.x_errors ^= decode_repeated_rounds(
        SpaceTimeGraph(base=ctx.graph_z, rounds=d), syn_z
    )
    if syn_x is not None:
        assert ctx.graph_x is not None
        syn_x[d] = mat_vec_mul(code.hx, frame.z_errors)
        frame.z_errors ^= decode_repeated_rounds(
            SpaceTimeGraph(base=ctx.graph_x, rounds=d), syn_x
        )
    if int(mat_vec_mul(code.hz, frame.x_errors).sum()) != 0:
        raise ContractViolationError(
            "frame has nonzero Z-side syndrome after space-time decoding"
        )
    failure_x, failure_z = logical_failure(code, frame)
    reduced: int | None = None
    if compute_reduced_weight:
        reduced = reduced_weight(code, frame.x_errors, pauli="X")
    return TrialOutcome(
        failure_x=failure_x,
        failure_z=failure_z,
        residual_weight=frame.weight,
        residual_reduced_weight=reduced,
        rounds_executed=d,
    )


def logical_failure(code: CssCode, residual: PauliFrame) -> tuple[bool, bool]:
    """Judge the residual frame: (X-sector failure, Z-sector failure).

    The X sector fails when the residual X errors have odd overlap with any
    logical-Z operator (and symmetrically).  The residual must have zero
    syndrome on both sides — corrections are required to reproduce their
    syndromes — otherwise the call is a contract violation.
    """
    if int(mat_vec_mul(code.hz, residual.x_errors).sum()) != 0:
        raise ContractViolationError("residual X errors have nonzero syndrome")
    if int(mat_vec_mul(code.hx, residual.z_errors).sum()) != 0:
        raise ContractViolationError("residual Z errors have nonzero syndrome")
    failure_x = any(
        np.count_nonzero(lz & residual.x_errors) % 2 for lz in code.logical_z
    )
    failure_z = any(
        np.count_nonzero(lx & residual.z_errors) % 2 for lx in code.logical_x
    )
    return bool(failure_x), bool(failure_z)


_POP16 = np.bitwise_count(np.arange(1 << 16, dtype=np.uint32)).astype(np.uint8)


@njit(cache=True)
def _gray_min_weight(basis: np.ndarray, start: np.ndarray) -> np.int64:
    """Minimum Hamming weight over the coset start + span(basis rows).

    basis is (r, W) packed uint64, start is (W,); iterates the 2^r subset
    sums in Gray-code order so each step XORs a single row.
    """
    n_words = start.shape[0]
    cur = start.copy()
    best = np.int64(0)
    for k in range(n_words):
        v = cur[k]
        best += (
            _POP16[v & np.uint64(0xFFFF)]
            + _POP16[(v >> np.uint64(16)) & np.uint64(0xFFFF)]
            + _POP16[(v >> np.uint64(32)) & np.uint64(0xFFFF)]
            + _POP16[v >> np.uint64(48)]
        )
    r = basis.shape[0]
    total = np.int64(1) << r
    i = np.int64(1)
    while i < total and best > 0:
        j = np.uint64(i & (-i)) - np.uint64(1)
        idx = np.int64(
            _POP16[j & np.uint64(0xFFFF)]
            + _POP16[(j >> np.uint64(16)) & np.uint64(0xFFFF)]
        )
        w = np.int64(0)
        for k in range(n_words):
            v = cur[k] ^ basis[idx, k]
            cur[k] = v
            w += (
                _POP16[v & np.uint64(0xFFFF)]
                + _POP16[(v >> np.uint64(16)) & np.uint64(0xFFFF)]
                + _POP16[(v >> np.uint64(32)) & np.uint64(0xFFFF)]
                + _POP16[v >> np.uint64(48)]
            )
        if w < best:
            best = w
        i += 1
    return best


def reduced_weight(code: CssCode, E: np.ndarray, pauli: str = "X") -> int:
    """Exact reduced weight min{wt(s·E) : s in the stabilizer group}.

    Only same-type stabilizers change a pure-X (or pure-Z) error, so the
    coset ranges over the row space of hx for X errors and hz for Z errors.
    Exhaustive Gray-code enumeration; ranks above 26 raise (callers may fall
    back to a matching-based upper bound, reported as such).
    """
    E = np.asarray(E, dtype=np.uint8)
    if E.shape != (code.n,):
        raise ContractViolationError(
            f"error vector must have length {code.n}, got {E.shape}"
        )
    pauli = pauli.upper()
    if pauli not in ("X", "Z"):
        raise InvalidParameterError(f'pauli must be "X" or "Z", got {pauli!r}')
    stab = code.hx if pauli == "X" else code.hz
    elim = row_reduce_tracked(stab)
    if elim.rank > REDUCED_WEIGHT_RANK_CAP:
        raise UnsupportedSizeError(
            f"stabilizer rank {elim.rank} exceeds the exact-search cap "
            f"{REDUCED_WEIGHT_RANK_CAP}"
        )
    inv_perm = np.empty_like(elim.column_perm)
    inv_perm[elim.column_perm] = np.arange(elim.column_perm.shape[0])
    basis = BitMatrix.from_dense(elim.standard_form.to_dense()[:, inv_perm])
    start = BitMatrix.from_dense(E[None, :])
    return int(
        _gray_min_weight(
            np.ascontiguousarray(basis.bits), start.bits[0].copy()
        )
    )


def per_round_rate(p_L_cumulative: float, N: int) -> float:
    """Per-round failure rate from a cumulative rate over N rounds."""
    if not 0.0 <= p_L_cumulative <= 1.0:
        raise ContractViolationError(
            f"cumulative probability {p_L_cumulative} outside [0, 1]"
        )
    if N < 1:
        raise ContractViolationError(f"round count must be >= 1, got {N}")
    return 1.0 - (1.0 - p_L_cumulative) ** (1.0 / N)
