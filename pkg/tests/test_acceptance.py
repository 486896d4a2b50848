"""Desk-scale acceptance runs for the whole pipeline.

Each test re-derives one headline result of the simulator at reduced trial
counts: threshold locations from crossing fits, the no-threshold verdict for
purely local decoding of the single-shot checks, measurement-error
confinement, decoder exactness, and fit-layer recovery on synthetic data.
Tolerances are Monte-Carlo-aware (2 sigma margins, interval checks around
the converged values).  The module takes tens of minutes single-core; the
cheap structural checks run first so failures surface early.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from helpers import TRUE_CROSSING, synthetic_crossing_records
from ssqec.codes import (
    analytic_toric_single_shot,
    build_code,
    derive_single_shot_basis,
)
from ssqec.decode import (
    brute_force_matching,
    build_matching_graph,
    decode_single_shot_round,
    mwpm_match,
)
from ssqec.gf2 import BitMatrix, mat_vec_mul, rank
from ssqec.protocol import CheckScheme, per_round_rate
from ssqec.stats import (
    CrossingFit,
    NoThresholdResult,
    SweepTemplate,
    fit_crossing,
    fit_sustainable,
    run_sweep,
    sustainable_ansatz,
)

PHEN = "phenomenological"
THRESHOLD_TRIALS = 20_000
DECAY_TRIALS = 8_000


def _two_sigma(a, b) -> float:
    return 2.0 * math.hypot(a, b)


def _row_space_equal(a: BitMatrix, b: BitMatrix) -> bool:
    stacked = BitMatrix.from_dense(np.vstack([a.to_dense(), b.to_dense()]))
    return rank(stacked) == rank(a) == rank(b)


def _crossing_fit(ps, Ls, N, trials, master_seed, guess, *, scheme, model=PHEN,
                  family="toric", window=0.015) -> CrossingFit:
    template = SweepTemplate(family=family, check_scheme=scheme, model=model)
    grid = [(p, L, N) for L in Ls for p in ps]
    sweep = run_sweep(grid, template, trials=trials, master_seed=master_seed)
    fit = fit_crossing(sweep, p_th_guess=guess, window=window, seed=1)
    assert isinstance(fit, CrossingFit), getattr(fit, "message", fit)
    return fit


# ---------------------------------------------------------------- structure


@pytest.mark.parametrize("side", ["Z", "X"])
def test_single_shot_bases_structural(side):
    """Both constructions, L = 2..9: counts, row space, single-flip, exact."""
    for L in range(2, 10):
        code = build_code("toric", L)
        local = code.hz if side == "Z" else code.hx
        analytic = analytic_toric_single_shot(L, side=side)
        eliminated = derive_single_shot_basis(code, side=side)

        kinds = list(analytic.kinds)
        assert kinds.count("rectangular") == (L - 1) * L
        assert kinds.count("circular") == L - 1
        assert analytic.n_checks == L * L - 1
        assert eliminated.n_checks == rank(local) == L * L - 1

        for basis in (analytic, eliminated):
            assert _row_space_equal(basis.checks, local)
            assert len(set(basis.designated_qubit.tolist())) == basis.n_checks
            for i, q in enumerate(basis.designated_qubit):
                e = np.zeros(code.n, dtype=np.uint8)
                e[q] = 1
                syn = mat_vec_mul(basis.checks, e)
                expected = np.zeros(basis.n_checks, dtype=np.uint8)
                expected[i] = 1
                assert np.array_equal(syn, expected)


@pytest.mark.parametrize("L", [3, 5, 7])
def test_matching_is_minimum_weight_exact(L):
    """1000 fuzzed defect sets per size: matched weight == brute force."""
    code = build_code("toric", L)
    g = build_matching_graph(code.hz)
    rng = np.random.default_rng(600 + L)
    max_pairs = min(6, g.n_nodes // 2)
    for _ in range(1000):
        k = 2 * int(rng.integers(1, max_pairs + 1))
        defects = rng.choice(g.n_nodes, size=k, replace=False)
        qubits = mwpm_match(g, defects)
        _, bf_weight = brute_force_matching(defects, lambda a, b: g.dist[a, b])
        assert len(qubits) == bf_weight


def test_measurement_error_confinement():
    """One noisy round leaves a residual no heavier than the lies told to it.

    L = 5: every single data error heals completely, every single
    measurement flip leaves at most a (reduced) weight-1 residue, and 10^4
    random two-error injections (data and/or measurement) never leave a
    residual whose reduced weight exceeds the number of measurement errors.
    Reduced weights are computed exactly against a table of every coset
    reachable by errors of weight <= 2.
    """
    L = 5
    code = build_code("toric", L)
    basis = analytic_toric_single_shot(L, side="Z")
    g = build_matching_graph(code.hz)
    hzd = code.hz.to_dense()
    lz = np.array(code.logical_z, dtype=np.uint8)
    checks_d = basis.checks.to_dense()
    n, m = code.n, basis.n_checks

    def signature(vec: np.ndarray) -> bytes:
        syn = (hzd @ vec) % 2
        par = (lz @ vec) % 2
        return syn.astype(np.uint8).tobytes() + par.astype(np.uint8).tobytes()

    best: dict[bytes, int] = {}

    def note(vec: np.ndarray, w: int) -> None:
        s = signature(vec)
        if s not in best or w < best[s]:
            best[s] = w

    zero = np.zeros(n, dtype=np.uint8)
    note(zero, 0)
    for i in range(n):
        v = zero.copy()
        v[i] = 1
        note(v, 1)
    for i in range(n):
        for j in range(i + 1, n):
            v = zero.copy()
            v[i] = 1
            v[j] = 1
            note(v, 2)
    # every weight-4 stabilizer generator merges its 3 complementary
    # half/half splits, so of the 1276 candidates 25 * 3 coincide
    assert len(best) == 1 + n + n * (n - 1) // 2 - 3 * code.hx.rows

    def reduced(residual: np.ndarray) -> int:
        # absent from the table means the true reduced weight is >= 3
        return best.get(signature(residual), 3)

    def run_round(e: np.ndarray, f: np.ndarray) -> np.ndarray:
        observed = ((checks_d @ e) % 2).astype(np.uint8) ^ f
        corr = decode_single_shot_round(basis, g, observed)
        return e ^ corr

    no_flips = np.zeros(m, dtype=np.uint8)
    for i in range(n):
        e = zero.copy()
        e[i] = 1
        assert reduced(run_round(e, no_flips)) == 0
    for j in range(m):
        f = no_flips.copy()
        f[j] = 1
        assert reduced(run_round(zero.copy(), f)) <= 1

    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        e = zero.copy()
        f = no_flips.copy()
        slots = rng.choice(n + m, size=2, replace=False)
        n_meas = 0
        for s in slots:
            if s < n:
                e[s] ^= 1
            else:
                f[s - n] ^= 1
                n_meas += 1
        assert reduced(run_round(e, f)) <= n_meas


# -------------------------------------------------------------- fit layer


def test_crossing_fit_recovery():
    """All five crossing parameters back within 5% from 1%-noise synthetic."""
    records = synthetic_crossing_records(seed=0)
    fit = fit_crossing(records, p_th_guess=0.07, window=0.15, seed=1)
    assert isinstance(fit, CrossingFit)
    got = dict(a0=fit.a0, a1=fit.a1, a2=fit.a2, mu=fit.mu, p_th=fit.p_th)
    for key, true in TRUE_CROSSING.items():
        assert abs(got[key] - true) <= 0.05 * abs(true), (key, got[key], true)


def test_sustainable_fit_recovery():
    """Exact parameter recovery from noiseless decay-curve samples."""
    p_sus, gamma, p_th0 = 0.0562, 1.185, 0.1027
    points = [
        (N, sustainable_ansatz(N, p_sus, gamma, p_th0)) for N in (0, 1, 2, 4, 8)
    ]
    fit = fit_sustainable(points, seed=1)
    assert abs(fit.p_sus - p_sus) < 1e-6
    assert abs(fit.gamma - gamma) < 1e-5
    assert abs(fit.p_th0 - p_th0) < 1e-6


# -------------------------------------------------- open-boundary families


@pytest.mark.parametrize("family", ["planar", "rotated"])
def test_open_boundary_families_support_single_shot(family):
    """Eliminated bases exist and behave; coarse sweep shows a threshold."""
    for L in (3, 5, 7):
        code = build_code(family, L)
        for side in ("Z", "X"):
            basis = derive_single_shot_basis(code, side=side)
            local = code.hz if side == "Z" else code.hx
            assert basis.n_checks == rank(local)
            for i, q in enumerate(basis.designated_qubit):
                e = np.zeros(code.n, dtype=np.uint8)
                e[q] = 1
                syn = mat_vec_mul(basis.checks, e)
                expected = np.zeros(basis.n_checks, dtype=np.uint8)
                expected[i] = 1
                assert np.array_equal(syn, expected)

    template = SweepTemplate(
        family=family, check_scheme=CheckScheme.SINGLE_SHOT_ELIMINATED, model=PHEN
    )
    sweep = run_sweep(
        [(p, L, 1) for L in (3, 7) for p in (0.03, 0.09)],
        template,
        trials=6000,
        master_seed=109,
    )
    rec = {(r.L, r.p): r for r in sweep}
    lo_small, lo_big = rec[(3, 0.03)], rec[(7, 0.03)]
    hi_small, hi_big = rec[(3, 0.09)], rec[(7, 0.09)]
    # below threshold the larger lattice wins, above it loses
    assert lo_big.p_L < lo_small.p_L - _two_sigma(lo_big.stderr, lo_small.stderr)
    assert hi_big.p_L > hi_small.p_L + _two_sigma(hi_big.stderr, hi_small.stderr)


# ------------------------------------------------------------- gate noise


def test_zx_repeated_rounds_threshold():
    """Correlated two-qubit noise, L rounds of local decoding per lattice."""
    fit = _crossing_fit(
        ps=(0.0055, 0.0065, 0.0075, 0.0085, 0.0095),
        Ls=(5, 7, 9),
        N=1,
        trials=DECAY_TRIALS,
        master_seed=107,
        guess=0.0075,
        scheme=CheckScheme.LOCAL_REPEATED,
        model="zx",
        window=0.0035,
    )
    print(f"[acceptance] zx repeated threshold p_g = {fit.p_th:.5f}")
    assert 0.003 <= fit.p_th <= 0.009


def test_zx_single_shot_has_finite_optimal_size():
    """At fixed gate noise the best lattice is an interior size, not the
    largest: high-weight checks get noisier with L faster than the distance
    helps."""
    template = SweepTemplate(
        family="toric", check_scheme=CheckScheme.SINGLE_SHOT_ANALYTIC, model="zx"
    )
    sweep = run_sweep(
        [(0.003, L, 10) for L in (3, 5, 7, 9)],
        template,
        trials=10_000,
        master_seed=108,
    )
    rec = {r.L: r for r in sweep}
    rates = {L: per_round_rate(rec[L].p_L, 10) for L in rec}
    best_L = min(rates, key=rates.get)
    print(f"[acceptance] zx single-shot per-round rates: {rates}")
    assert best_L != 9
    assert rec[9].p_L - rec[best_L].p_L > _two_sigma(
        rec[9].stderr, rec[best_L].stderr
    )


# ---------------------------------------------------- local decoding limit


def test_local_single_shot_decoding_shows_no_threshold():
    """Decoding the high-weight checks with a purely local matcher fails
    harder on larger lattices at every error rate in the growing regime."""
    ps = (0.01, 0.022, 0.034, 0.046, 0.058, 0.07)
    template = SweepTemplate(
        family="toric", check_scheme=CheckScheme.LOCAL_SINGLE_SHOT, model=PHEN
    )
    sweep = run_sweep(
        [(p, L, 1) for L in (9, 13, 17) for p in ps],
        template,
        trials=THRESHOLD_TRIALS,
        master_seed=106,
    )
    verdict = fit_crossing(sweep, p_th_guess=0.04, window=0.05, seed=1)
    assert isinstance(verdict, NoThresholdResult), verdict
    assert set(verdict.p_values) == set(ps)


# -------------------------------------------------------------- thresholds


@pytest.fixture(scope="module")
def baseline_fit() -> CrossingFit:
    """Perfect-measurement memory threshold of the toric code."""
    return _crossing_fit(
        ps=np.linspace(0.091, 0.115, 5),
        Ls=(7, 9, 11, 13),
        N=0,
        trials=THRESHOLD_TRIALS,
        master_seed=101,
        guess=0.1027,
        scheme=CheckScheme.SINGLE_SHOT_ANALYTIC,
    )


@pytest.fixture(scope="module")
def single_shot_fit() -> CrossingFit:
    """One noisy single-shot cycle, measurement noise q = p."""
    return _crossing_fit(
        ps=np.linspace(0.060, 0.082, 5),
        Ls=(9, 13, 17),
        N=1,
        trials=THRESHOLD_TRIALS,
        master_seed=102,
        guess=0.0712,
        scheme=CheckScheme.SINGLE_SHOT_ANALYTIC,
    )


@pytest.fixture(scope="module")
def decay_fits(baseline_fit, single_shot_fit) -> dict[int, CrossingFit]:
    fits = {0: baseline_fit, 1: single_shot_fit}
    for N, ps, guess, seed in (
        (2, np.linspace(0.0485, 0.0695, 5), 0.059, 103),
        (4, np.linspace(0.045, 0.066, 5), 0.0555, 104),
        (8, np.linspace(0.0445, 0.0655, 5), 0.055, 105),
    ):
        fits[N] = _crossing_fit(
            ps=ps,
            Ls=(9, 13, 17),
            N=N,
            trials=DECAY_TRIALS,
            master_seed=seed,
            guess=guess,
            scheme=CheckScheme.SINGLE_SHOT_ANALYTIC,
        )
    return fits


def test_toric_code_capacity_threshold(baseline_fit):
    print(
        f"[acceptance] code-capacity threshold p_th = "
        f"{baseline_fit.p_th:.4f} +- {baseline_fit.p_th_err:.4f}"
    )
    assert 0.096 <= baseline_fit.p_th <= 0.109


def test_single_shot_threshold(single_shot_fit):
    print(
        f"[acceptance] single-shot threshold p_th = "
        f"{single_shot_fit.p_th:.4f} +- {single_shot_fit.p_th_err:.4f}"
    )
    assert 0.061 <= single_shot_fit.p_th <= 0.081


def test_threshold_decay_monotone_to_plateau(decay_fits):
    for n_lo, n_hi in ((0, 1), (1, 2), (2, 4), (4, 8)):
        lo, hi = decay_fits[n_lo], decay_fits[n_hi]
        assert hi.p_th <= lo.p_th + _two_sigma(lo.p_th_err, hi.p_th_err), (
            n_lo,
            n_hi,
            lo.p_th,
            hi.p_th,
        )
    four, eight = decay_fits[4], decay_fits[8]
    assert abs(eight.p_th - four.p_th) <= _two_sigma(
        four.p_th_err, eight.p_th_err
    )


def test_sustainable_threshold(decay_fits):
    points = [(N, fit.p_th) for N, fit in sorted(decay_fits.items())]
    fit = fit_sustainable(points, seed=1)
    print(
        f"[acceptance] sustainable threshold p_sus = {fit.p_sus:.4f} "
        f"(gamma = {fit.gamma:.3f}, p_th0 = {fit.p_th0:.4f})"
    )
    assert fit.gamma > 0
    assert 0.045 <= fit.p_sus <= 0.065
