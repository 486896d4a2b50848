"""Monte Carlo sweeps and threshold fits.

Sweeps run independent trials on a (p, L, N) grid with per-trial derived
seeds, so results are reproducible and independent of worker count or chunk
boundaries.  Threshold estimation follows the standard finite-size scaling
recipe: logical failure rates near the crossing are fitted against
a0 + a1*x + a2*x^2 with x = (p - p_th) * L^(1/mu), and the N-dependence of
the fitted thresholds is summarized by the saturating ansatz
p_th(N) = p_sus * (1 - [1 - p_th(0)/p_sus] * exp(-gamma*N)).

Both fitters use derivative-free simplex minimization over the nonlinear
parameters with the linear coefficients profiled out by least squares, with
jittered restarts; crossing-fit uncertainty comes from a parametric
bootstrap of the binomial counts.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .codes import build_code
from .errors import FitFailureError, InvalidParameterError
from .noise import PhenomenologicalParams, ZxParams
from .protocol import (
    CheckScheme,
    TrialConfig,
    run_repeated_trial,
    run_single_shot_trial,
)

MODELS = ("phenomenological", "zx")
MIN_TRIALS_PER_POINT = 100
DEFAULT_WINDOW = 0.015
DEFAULT_BOOTSTRAP = 200
DEFAULT_RESTARTS = 5


@dataclass(frozen=True)
class SweepRecord:
    model: str
    check_scheme: str
    family: str
    L: int
    N: int
    p: float
    trials: int
    failures: int
    p_L: float
    stderr: float
    seed: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple[SweepRecord, ...]

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def at_n(self, N: int) -> "SweepResult":
        return SweepResult(tuple(r for r in self.records if r.N == N))


@dataclass(frozen=True)
class SweepTemplate:
    """Everything about a sweep that is not the (p, L, N) grid."""

    family: str
    check_scheme: CheckScheme
    model: str
    sides: str = "Z"
    q: float | None = None
    ancilla_depolarizing_as_flip: bool = True

    def __post_init__(self) -> None:
        if not isinstance(self.check_scheme, CheckScheme):
            object.__setattr__(
                self, "check_scheme", CheckScheme(str(self.check_scheme))
            )
        if self.model not in MODELS:
            raise InvalidParameterError(
                f"model must be one of {MODELS}, got {self.model!r}"
            )
        if self.model == "zx" and self.sides != "both":
            # Correlated ZX noise populates both error streams; decoding
            # only one side would silently ignore half the model.
            object.__setattr__(self, "sides", "both")


def _point_hash(
    model: str, scheme: str, family: str, L: int, N: int, p: float
) -> int:
    key = repr((model, scheme, family, L, N, round(float(p), 12)))
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _trial_rng(master_seed: int, point_hash: int, index: int):
    ss = np.random.SeedSequence([master_seed, point_hash, index])
    return np.random.Generator(np.random.PCG64(ss))


def _run_point_range(
    template: SweepTemplate,
    p: float,
    L: int,
    N: int,
    master_seed: int,
    lo: int,
    hi: int,
) -> int:
    """Run trials [lo, hi) of one grid point; returns the failure count."""
    code = build_code(template.family, L)
    if template.model == "phenomenological":
        noise: PhenomenologicalParams | ZxParams = PhenomenologicalParams(
            p=p, q=template.q
        )
    else:
        noise = ZxParams(
            p_g=p,
            ancilla_depolarizing_as_flip=template.ancilla_depolarizing_as_flip,
        )
    scheme = template.check_scheme
    repeated = scheme is CheckScheme.LOCAL_REPEATED
    rounds = L if repeated else N
    cfg = TrialConfig(
        code=code,
        check_scheme=scheme,
        noise=noise,
        rounds=rounds,
        seed=master_seed,
        sides=template.sides,
    )
    run = run_repeated_trial if repeated else run_single_shot_trial
    ph = _point_hash(
        template.model, scheme.value, template.family, L, N, p
    )
    failures = 0
    for t in range(lo, hi):
        if run(cfg, _trial_rng(master_seed, ph, t)).failed:
            failures += 1
    return failures


def run_sweep(
    grid: Sequence[tuple[float, int, int]],
    template: SweepTemplate,
    trials: int,
    workers: int = 1,
    master_seed: int = 0,
    trial_offset: int = 0,
) -> SweepResult:
    """Monte Carlo failure rates over a (p, L, N) grid.

    Each trial draws its generator from (master_seed, point, trial index),
    so merging two sweeps over disjoint trial-index ranges (via
    ``trial_offset``) reproduces one big sweep exactly, and the worker count
    never changes the counts.  For the local_repeated scheme the round count
    is L (one round per code distance), whatever N says.
    """
    if trials < MIN_TRIALS_PER_POINT:
        raise InvalidParameterError(
            f"at least {MIN_TRIALS_PER_POINT} trials per point required, "
            f"got {trials}"
        )
    if workers < 1:
        raise InvalidParameterError(f"workers must be >= 1, got {workers}")
    records = []
    if workers == 1:
        chunks = [(gi, trial_offset, trial_offset + trials) for gi in range(len(grid))]
    else:
        step = max(MIN_TRIALS_PER_POINT // 2, (trials + 3 * workers) // (4 * workers))
        chunks = []
        for gi in range(len(grid)):
            lo = trial_offset
            while lo < trial_offset + trials:
                hi = min(lo + step, trial_offset + trials)
                chunks.append((gi, lo, hi))
                lo = hi
    failures_by_point = [0] * len(grid)
    if workers == 1:
        for gi, lo, hi in chunks:
            p, L, N = grid[gi]
            failures_by_point[gi] += _run_point_range(
                template, float(p), int(L), int(N), master_seed, lo, hi
            )
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                (
                    gi,
                    pool.submit(
                        _run_point_range,
                        template,
                        float(grid[gi][0]),
                        int(grid[gi][1]),
                        int(grid[gi][2]),
                        master_seed,
                        lo,
                        hi,
                    ),
                )
                for gi, lo, hi in chunks
            ]
            for gi, fut in futures:
                failures_by_point[gi] += fut.result()
    for gi, (p, L, N) in enumerate(grid):
        fails = failures_by_point[gi]
        p_L = fails / trials
        rec = SweepRecord(
            model=template.model,
            check_scheme=template.check_scheme.value,
            family=template.family,
            L=int(L),
            N=int(L) if template.check_scheme is CheckScheme.LOCAL_REPEATED else int(N),
            p=float(p),
            trials=trials,
            failures=fails,
            p_L=p_L,
            stderr=float(np.sqrt(p_L * (1.0 - p_L) / trials)),
            seed=master_seed,
        )
        records.append(rec)
    return SweepResult(tuple(records))


@dataclass(frozen=True)
class CrossingFit:
    p_th: float
    mu: float
    a0: float
    a1: float
    a2: float
    residual: float
    p_th_err: float | None = None


@dataclass(frozen=True)
class NoThresholdResult:
    """Verdict that the failure rate grows with L at every swept p."""

    p_values: tuple[float, ...]
    message: str


@dataclass(frozen=True)
class SustainableFit:
    p_sus: float
    gamma: float
    p_th0: float
    degenerate: bool = False
    residual: float = 0.0


def sustainable_ansatz(
    N: np.ndarray | float, p_sus: float, gamma: float, p_th0: float
) -> np.ndarray | float:
    """p_th(N) = p_sus * (1 - [1 - p_th0/p_sus] * exp(-gamma*N))."""
    N = np.asarray(N, dtype=float)
    return p_sus * (1.0 - (1.0 - p_th0 / p_sus) * np.exp(-gamma * N))


def _as_records(sweep: SweepResult | Iterable[SweepRecord]) -> list[SweepRecord]:
    if isinstance(sweep, SweepResult):
        return list(sweep.records)
    return list(sweep)


def _check_no_threshold(records: list[SweepRecord]) -> NoThresholdResult | None:
    """No-threshold verdict: p_L strictly increasing in L beyond two
    standard errors at every swept p."""
    by_p: dict[float, list[SweepRecord]] = {}
    for r in records:
        by_p.setdefault(r.p, []).append(r)
    if not by_p or any(len(v) < 2 for v in by_p.values()):
        return None
    for p, recs in by_p.items():
        recs.sort(key=lambda r: r.L)
        for a, b in zip(recs, recs[1:]):
            margin = 2.0 * float(np.hypot(a.stderr, b.stderr))
            if not (b.p_L - a.p_L > margin):
                return None
    ps = tuple(sorted(by_p))
    return NoThresholdResult(
        p_values=ps,
        message=(
            "failure rate increases with L beyond 2 standard errors at "
            f"every swept p ({len(ps)} values); no threshold in range"
        ),
    )


def _quadratic_profile(
    p: np.ndarray, L: np.ndarray, y: np.ndarray, p_th: float, mu: float
) -> tuple[np.ndarray, float]:
    """Best (a0, a1, a2) and SSE at fixed (p_th, mu)."""
    x = (p - p_th) * L ** (1.0 / mu)
    A = np.stack([np.ones_like(x), x, x * x], axis=1)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = A @ coef - y
    return coef, float(resid @ resid)


def fit_crossing(
    sweep: SweepResult | Iterable[SweepRecord],
    p_th_guess: float,
    mu_guess: float = 1.5,
    window: float = DEFAULT_WINDOW,
    restarts: int = DEFAULT_RESTARTS,
    bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
) -> CrossingFit | NoThresholdResult:
    """Finite-size-scaling crossing fit of one fixed-N sweep slice.

    Only points with |p - p_th_guess| <= window enter the fit.  If instead
    the failure rate increases with L (beyond 2 standard errors) at every
    swept p — checked on the full slice before windowing — the data shows no
    threshold and a NoThresholdResult verdict is returned.
    """
    records = _as_records(sweep)
    if len({r.N for r in records}) > 1:
        # repeated-rounds data runs L rounds at distance L by convention, so
        # N == L on every record is still one comparable slice
        repeated = all(
            r.check_scheme == CheckScheme.LOCAL_REPEATED.value and r.N == r.L
            for r in records
        )
        if not repeated:
            raise InvalidParameterError(
                "fit_crossing expects a slice at fixed N; "
                f"got N values {sorted({r.N for r in records})}"
            )
    verdict = _check_no_threshold(records)
    if verdict is not None:
        return verdict
    sel = [r for r in records if abs(r.p - p_th_guess) <= window]
    n_L = len({r.L for r in sel})
    n_p = len({r.p for r in sel})
    if n_L < 3 or n_p < 4:
        raise InvalidParameterError(
            f"crossing fit needs >= 3 lattice sizes and >= 4 p-values in the "
            f"window (got {n_L} and {n_p}); widen the window or the sweep"
        )
    p = np.array([r.p for r in sel])
    L = np.array([r.L for r in sel], dtype=float)
    y = np.array([r.p_L for r in sel])
    trials_arr = np.array([r.trials for r in sel])

    def objective(theta: np.ndarray) -> float:
        p_th, log_mu = theta
        return _quadratic_profile(p, L, y, p_th, float(np.exp(log_mu)))[1]

    rng = np.random.default_rng(seed)
    best: tuple[float, np.ndarray] | None = None
    inits = [(p_th_guess, np.log(mu_guess))]
    for _ in range(max(restarts - 1, 0)):
        inits.append(
            (
                p_th_guess * (1.0 + rng.normal(0, 0.05)),
                np.log(mu_guess) + rng.normal(0, 0.2),
            )
        )
    for init in inits:
        res = minimize(
            objective,
            np.asarray(init, dtype=float),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
        )
        if best is None or res.fun < best[0]:
            best = (float(res.fun), np.asarray(res.x))
    assert best is not None
    sse, theta = best
    p_th = float(theta[0])
    mu = float(np.exp(theta[1]))
    if not (p.min() - 1e-12 <= p_th <= p.max() + 1e-12):
        raise FitFailureError(
            f"fitted p_th={p_th:.6g} falls outside the windowed p-range "
            f"[{p.min():.6g}, {p.max():.6g}]"
        )
    coef, _ = _quadratic_profile(p, L, y, p_th, mu)
    p_th_err: float | None = None
    if bootstrap > 0:
        boot = []
        for _ in range(bootstrap):
            y_b = rng.binomial(trials_arr, y) / trials_arr
            res = minimize(
                lambda th: _quadratic_profile(
                    p, L, y_b, th[0], float(np.exp(th[1]))
                )[1],
                theta,
                method="Nelder-Mead",
                options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 2000},
            )
            b_pth = float(res.x[0])
            # A diverged resample refit (p_th outside the data) carries no
            # information about the estimator's spread; drop it.
            if p.min() <= b_pth <= p.max():
                boot.append(b_pth)
        if boot:
            p_th_err = float(np.std(boot))
    return CrossingFit(
        p_th=p_th,
        mu=mu,
        a0=float(coef[0]),
        a1=float(coef[1]),
        a2=float(coef[2]),
        residual=float(np.sqrt(sse / len(sel))),
        p_th_err=p_th_err,
    )


def fit_sustainable(
    thresholds: Iterable[tuple[float, float]],
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> SustainableFit:
    """Fit p_th(N) = p_sus*(1-[1-p_th0/p_sus]*exp(-gamma*N)).

    Requires at least four distinct N.  A (weakly) increasing threshold
    sequence contradicts the saturating-decay ansatz and raises
    FitFailureError, as does a fit driven to gamma <= 0.  An exactly
    constant sequence is the ansatz's fixed point: p_sus = p_th0 = c with
    gamma unidentifiable, returned with the degenerate flag.
    """
    pts = sorted((float(n), float(v)) for n, v in thresholds)
    if len({n for n, _ in pts}) < 4:
        raise InvalidParameterError(
            f"need at least 4 distinct N values, got {len(pts)}"
        )
    N = np.array([n for n, _ in pts])
    y = np.array([v for _, v in pts])
    if np.ptp(y) < 1e-12:
        c = float(y.mean())
        return SustainableFit(
            p_sus=c, gamma=float("nan"), p_th0=c, degenerate=True
        )
    diffs = np.diff(y)
    if (diffs >= 0).all():
        raise FitFailureError(
            "threshold sequence increases with N; the saturating-decay "
            "ansatz cannot describe it"
        )

    def profile(log_gamma: float) -> tuple[np.ndarray, float]:
        g = float(np.exp(log_gamma))
        A = np.stack([np.ones_like(N), np.exp(-g * N)], axis=1)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        resid = A @ coef - y
        return coef, float(resid @ resid)

    rng = np.random.default_rng(seed)
    inits = [0.0] + list(rng.normal(0.0, 1.0, size=max(restarts - 1, 0)))
    best: tuple[float, float] | None = None
    for t0 in inits:
        res = minimize(
            lambda t: profile(float(t[0]))[1],
            np.array([t0]),
            method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 4000},
        )
        if best is None or res.fun < best[0]:
            best = (float(res.fun), float(res.x[0]))
    assert best is not None
    sse, log_gamma = best
    gamma = float(np.exp(log_gamma))
    coef, _ = profile(log_gamma)
    p_sus = float(coef[0])
    p_th0 = float(coef[0] + coef[1])
    if not np.isfinite(gamma) or gamma <= 0.0:
        raise FitFailureError(f"fit drove gamma to {gamma}; rejected")
    if coef[1] < 0:
        raise FitFailureError(
            "fit implies p_sus > p_th(0), contradicting saturating decay"
        )
    return SustainableFit(
        p_sus=p_sus,
        gamma=gamma,
        p_th0=p_th0,
        degenerate=False,
        residual=float(np.sqrt(sse / len(pts))),
    )
