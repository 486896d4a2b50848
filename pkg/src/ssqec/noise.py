"""Noise models for error-correction trials.

Two models are implemented:

* phenomenological — independent X flips on data qubits at probability p and
  independent flips of each measured syndrome bit at probability q (default
  q = p);
* correlated ZX gate noise — a depolarizing channel on data qubits before
  each round, a correlated fault per CNOT of the syndrome-extraction circuit
  (one data error of the type the measured check cannot see, plus a flip of
  that check's outcome), and outcome flips from ancilla preparation and
  readout.  Because the syndrome ancilla interacts once per support qubit,
  the outcome-flip probability grows with check weight, which is what makes
  high-weight checks expensive under this model.

Samplers consume their generator in a fixed documented order, so identical
seeds reproduce identical rounds bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CssCode, SingleShotBasis
from .errors import InvalidParameterError
from .gf2 import BitMatrix


@dataclass(frozen=True)
class PhenomenologicalParams:
    """Bit-flip probability p and measurement-flip probability q (None -> p)."""

    p: float
    q: float | None = None

    def __post_init__(self) -> None:
        if self.q is None:
            object.__setattr__(self, "q", float(self.p))
        for name in ("p", "q"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise InvalidParameterError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class ZxParams:
    """Gate error rate p_g for the correlated ZX model.

    ``ancilla_depolarizing_as_flip`` controls whether the pre-round
    depolarizing on syndrome qubits contributes an extra 2p_g/3 outcome flip
    on top of the explicit post-round readout flip (default on).
    """

    p_g: float
    ancilla_depolarizing_as_flip: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= float(self.p_g) <= 1.0:
            raise InvalidParameterError(f"p_g={self.p_g} outside [0, 1]")


@dataclass
class PauliFrame:
    """Accumulated X and Z error bits per qubit; Y sets both bits."""

    x_errors: np.ndarray
    z_errors: np.ndarray

    def __post_init__(self) -> None:
        self.x_errors = np.asarray(self.x_errors, dtype=np.uint8)
        self.z_errors = np.asarray(self.z_errors, dtype=np.uint8)
        if self.x_errors.shape != self.z_errors.shape:
            raise InvalidParameterError(
                f"frame shape mismatch: {self.x_errors.shape} vs "
                f"{self.z_errors.shape}"
            )

    @classmethod
    def zeros(cls, n: int) -> "PauliFrame":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @property
    def weight(self) -> int:
        """Number of qubits carrying any error."""
        return int(np.count_nonzero(self.x_errors | self.z_errors))


@dataclass(frozen=True)
class RoundSample:
    """One round's worth of sampled faults.

    Streams not produced by a model are None: the phenomenological model
    emits only X data errors and Z-side measurement flips.
    """

    data_x: np.ndarray | None
    data_z: np.ndarray | None
    meas_z: np.ndarray | None
    meas_x: np.ndarray | None


def sample_phenomenological_round(
    n_qubits: int,
    n_checks: int,
    params: PhenomenologicalParams,
    rng: np.random.Generator,
) -> RoundSample:
    """Independent X data flips (prob p) and measurement flips (prob q).

    Generator order: one uniform block for data, then one for measurements.
    """
    data = (rng.random(n_qubits) < params.p).astype(np.uint8)
    meas = (rng.random(n_checks) < params.q).astype(np.uint8)
    return RoundSample(data_x=data, data_z=None, meas_z=meas, meas_x=None)


def _checks_of(basis: SingleShotBasis | BitMatrix) -> BitMatrix:
    return basis.checks if isinstance(basis, SingleShotBasis) else basis


_support_cache: dict[tuple[int, int, bytes], tuple[np.ndarray, np.ndarray]] = {}


def _flat_supports(checks: BitMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Row-major (row_index, qubit) arrays of the check supports, cached."""
    key = (checks.rows, checks.cols, checks.bits.tobytes())
    hit = _support_cache.get(key)
    if hit is None:
        rows, cols = np.nonzero(checks.to_dense())
        hit = (rows.astype(np.int64), cols.astype(np.int64))
        if len(_support_cache) > 64:
            _support_cache.clear()
        _support_cache[key] = hit
    return hit


def sample_zx_round(
    code: CssCode,
    basis_z: SingleShotBasis | BitMatrix,
    basis_x: SingleShotBasis | BitMatrix,
    params: ZxParams,
    rng: np.random.Generator,
) -> RoundSample:
    """Sample one round of correlated ZX gate noise.

    Effects, composed by parity:

    1. pre-round depolarizing on each data qubit — X, Y, Z each with
       probability p_g/3 (X- and Z-component marginals 2p_g/3, correlated
       through Y); if enabled, each ancilla adds a 2p_g/3 outcome flip;
    2. per CNOT of a check (one per support qubit), with probability p_g:
       one data error invisible to that check (Z on data for Z-checks, X on
       data for X-checks) together with a flip of that check's outcome;
    3. post-round readout: each outcome flips with probability 2p_g/3.

    Generator order: data depolarizing; ancilla flips (Z side, X side); CNOT
    faults (Z side, X side, row-major over supports); readout flips (Z side,
    X side).  Idling qubits get no error.
    """
    checks_z = _checks_of(basis_z)
    checks_x = _checks_of(basis_x)
    n = code.n
    pg = float(params.p_g)

    r = rng.random(n)
    data_x = (r < 2.0 * pg / 3.0).astype(np.uint8)
    data_z = ((r >= pg / 3.0) & (r < pg)).astype(np.uint8)
    meas_z = np.zeros(checks_z.rows, dtype=np.uint8)
    meas_x = np.zeros(checks_x.rows, dtype=np.uint8)

    if params.ancilla_depolarizing_as_flip:
        meas_z ^= (rng.random(checks_z.rows) < 2.0 * pg / 3.0).astype(np.uint8)
        meas_x ^= (rng.random(checks_x.rows) < 2.0 * pg / 3.0).astype(np.uint8)

    rows_z, cols_z = _flat_supports(checks_z)
    fault = rng.random(rows_z.shape[0]) < pg
    if fault.any():
        np.bitwise_xor.at(data_z, cols_z[fault], 1)
        np.bitwise_xor.at(meas_z, rows_z[fault], 1)
    rows_x, cols_x = _flat_supports(checks_x)
    fault = rng.random(rows_x.shape[0]) < pg
    if fault.any():
        np.bitwise_xor.at(data_x, cols_x[fault], 1)
        np.bitwise_xor.at(meas_x, rows_x[fault], 1)

    meas_z ^= (rng.random(checks_z.rows) < 2.0 * pg / 3.0).astype(np.uint8)
    meas_x ^= (rng.random(checks_x.rows) < 2.0 * pg / 3.0).astype(np.uint8)
    return RoundSample(
        data_x=data_x, data_z=data_z, meas_z=meas_z, meas_x=meas_x
    )


def _compose(p1: float, p2: float) -> float:
    """Probability that exactly one of two independent flips occurs."""
    return p1 * (1.0 - p2) + p2 * (1.0 - p1)


def zx_measurement_flip_prob(w: int, params: ZxParams) -> float:
    """Closed-form outcome-flip probability of a weight-w check per round.

    Parity-composes the CNOT-fault contribution (1 - (1-2p_g)^w)/2 with the
    readout flip 2p_g/3 and, if enabled, the ancilla-preparation flip
    2p_g/3.  Serves as the analytic oracle for sample_zx_round.
    """
    if w < 1:
        raise InvalidParameterError(f"check weight must be >= 1, got {w}")
    pg = float(params.p_g)
    prob = (1.0 - (1.0 - 2.0 * pg) ** w) / 2.0
    prob = _compose(prob, 2.0 * pg / 3.0)
    if params.ancilla_depolarizing_as_flip:
        prob = _compose(prob, 2.0 * pg / 3.0)
    return prob
