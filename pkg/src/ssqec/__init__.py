"""Single-shot error correction on surface codes: check construction,
Monte Carlo noise trials, MWPM decoding, and threshold estimation."""

from .codes import (
    CssCode,
    SingleShotBasis,
    analytic_toric_single_shot,
    build_code,
    derive_single_shot_basis,
    validate_css,
)
from .decode import (
    MatchingGraph,
    SpaceTimeGraph,
    build_matching_graph,
    brute_force_matching,
    decode_repeated_rounds,
    decode_single_shot_round,
    map_syndrome_to_local,
    mwpm_match,
    parity_repair,
)
from .gf2 import (
    BitMatrix,
    TrackedElimination,
    mat_mul,
    mat_vec_mul,
    rank,
    row_reduce_tracked,
)
from .noise import (
    PauliFrame,
    PhenomenologicalParams,
    RoundSample,
    ZxParams,
    sample_phenomenological_round,
    sample_zx_round,
    zx_measurement_flip_prob,
)
from .protocol import (
    CheckScheme,
    TrialConfig,
    TrialOutcome,
    logical_failure,
    per_round_rate,
    reduced_weight,
    run_repeated_trial,
    run_single_shot_trial,
)
from .stats import (
    CrossingFit,
    NoThresholdResult,
    SustainableFit,
    SweepRecord,
    SweepResult,
    SweepTemplate,
    fit_crossing,
    fit_sustainable,
    run_sweep,
    sustainable_ansatz,
)

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "TrackedElimination",
    "mat_mul",
    "mat_vec_mul",
    "rank",
    "row_reduce_tracked",
    "CssCode",
    "SingleShotBasis",
    "build_code",
    "validate_css",
    "analytic_toric_single_shot",
    "derive_single_shot_basis",
    "MatchingGraph",
    "SpaceTimeGraph",
    "build_matching_graph",
    "brute_force_matching",
    "decode_repeated_rounds",
    "decode_single_shot_round",
    "map_syndrome_to_local",
    "mwpm_match",
    "parity_repair",
    "PauliFrame",
    "PhenomenologicalParams",
    "RoundSample",
    "ZxParams",
    "sample_phenomenological_round",
    "sample_zx_round",
    "zx_measurement_flip_prob",
    "CheckScheme",
    "TrialConfig",
    "TrialOutcome",
    "logical_failure",
    "per_round_rate",
    "reduced_weight",
    "run_repeated_trial",
    "run_single_shot_trial",
    "CrossingFit",
    "NoThresholdResult",
    "SustainableFit",
    "SweepRecord",
    "SweepResult",
    "SweepTemplate",
    "fit_crossing",
    "fit_sustainable",
    "run_sweep",
    "sustainable_ansatz",
    "__version__",
]
