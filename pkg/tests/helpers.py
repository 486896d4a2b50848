"""Shared test fixtures: synthetic sweep data with known fit parameters."""

import numpy as np

from ssqec.stats import SweepRecord

# Scaling-collapse parameters used to generate synthetic crossing data.
TRUE_CROSSING = dict(a0=0.388, a1=3.280, a2=-4.996, mu=1.505, p_th=0.07116)
# x-grid covering both branches of the collapse quadratic, chosen so every
# synthetic failure rate stays physical (0 < p_L < 1).
XGRID = tuple(
    np.concatenate([np.linspace(-0.09, 0.0, 6), np.linspace(0.04, 0.60, 12)])
)
LADDER = (9, 13, 19, 29, 43)


def synthetic_crossing_records(seed, noise=0.01, trials=20000):
    a0, a1, a2 = TRUE_CROSSING["a0"], TRUE_CROSSING["a1"], TRUE_CROSSING["a2"]
    mu, p_th = TRUE_CROSSING["mu"], TRUE_CROSSING["p_th"]
    rng = np.random.default_rng(seed)
    records = []
    for L in LADDER:
        for x in XGRID:
            p = p_th + x / L ** (1.0 / mu)
            y = a0 + a1 * x + a2 * x * x
            y_obs = float(y * (1.0 + rng.normal(0.0, noise)))
            records.append(
                SweepRecord(
                    model="phenomenological",
                    check_scheme="single_shot_analytic",
                    family="toric",
                    L=L,
                    N=1,
                    p=float(p),
                    trials=trials,
                    failures=int(round(y_obs * trials)),
                    p_L=y_obs,
                    stderr=float(np.sqrt(y_obs * (1 - y_obs) / trials)),
                    seed=0,
                )
            )
    return records
