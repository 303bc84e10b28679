"""Quasi-probability error cancellation for dephasing-dominated circuits,
with per-gate (standard), whole-block (aggregated Z-string control), and
hybrid segmented mitigation."""

from __future__ import annotations

from .blocks import (
    BlockCoefficients,
    MitigationPlan,
    PlanSegment,
    analytic_pattern_gammas,
    block_coefficients,
    effective_noise,
    fold_noisy_controls,
    gamma_blk,
    gamma_std,
    hybrid_plan,
    layer_distribution,
    naive_block_coefficients,
    pattern_circuit,
)
from .circuits import (
    Circuit,
    load_circuit,
    parse_circuit,
    save_circuit,
    serialize_circuit,
)
from .classify import (
    CompatReport,
    classify_circuit,
    is_bias_preserving,
    is_s1_bias_preserving,
    maximal_segments,
    pauli_z_compatible,
)
from .conjugation import (
    PASS_THROUGH_KINDS,
    conjugate_z_string,
    generator_images,
)
from .errors import (
    BlockPecError,
    CircuitParseError,
    DegenerateVector,
    GuardExceeded,
    InvalidArgument,
    InvalidSamples,
    NotZClosed,
    SingularChannel,
    Unsupported,
    UnsupportedGate,
    UnsupportedKind,
)
from .experiments import (
    CSV_HEADER,
    ExperimentConfig,
    FitResult,
    GainRow,
    build_family_circuit,
    fit_models,
    mean_gain_by_n,
    read_gain_csv,
    run_gain_experiment,
    write_gain_csv,
)
from .gates import GATE_KINDS, GateOp, expand_composite, unitary_of
from .generators import (
    gen_option_payoff,
    gen_random_bp,
    gen_rbs_pyramid,
    gen_swap_network,
    gen_unary_loader,
    rbs_sequence,
)
from .noise import (
    NoiseSpec,
    PauliMixture,
    ZMixtureChannel,
    fwht,
    gamma_of,
    invert_z_mixture,
    make_dephasing,
    make_impure,
    taylor_inverse,
)
from .pauli import PauliZString
from .simulate import (
    EstimatorReport,
    Observable,
    exact_mitigated_expectation,
    ideal_expectation,
    noisy_expectation,
    pec_estimate,
    required_samples,
)

__version__ = "0.1.0"

__all__ = [
    "BlockCoefficients",
    "BlockPecError",
    "CSV_HEADER",
    "Circuit",
    "CircuitParseError",
    "CompatReport",
    "DegenerateVector",
    "EstimatorReport",
    "ExperimentConfig",
    "FitResult",
    "GATE_KINDS",
    "GainRow",
    "GateOp",
    "GuardExceeded",
    "InvalidArgument",
    "InvalidSamples",
    "MitigationPlan",
    "NoiseSpec",
    "NotZClosed",
    "Observable",
    "PASS_THROUGH_KINDS",
    "PauliMixture",
    "PauliZString",
    "PlanSegment",
    "SingularChannel",
    "Unsupported",
    "UnsupportedGate",
    "UnsupportedKind",
    "ZMixtureChannel",
    "analytic_pattern_gammas",
    "block_coefficients",
    "build_family_circuit",
    "classify_circuit",
    "conjugate_z_string",
    "effective_noise",
    "exact_mitigated_expectation",
    "expand_composite",
    "fit_models",
    "fold_noisy_controls",
    "fwht",
    "gamma_blk",
    "gamma_of",
    "gamma_std",
    "gen_option_payoff",
    "gen_random_bp",
    "gen_rbs_pyramid",
    "gen_swap_network",
    "gen_unary_loader",
    "generator_images",
    "hybrid_plan",
    "ideal_expectation",
    "invert_z_mixture",
    "is_bias_preserving",
    "is_s1_bias_preserving",
    "layer_distribution",
    "load_circuit",
    "make_dephasing",
    "make_impure",
    "maximal_segments",
    "mean_gain_by_n",
    "naive_block_coefficients",
    "noisy_expectation",
    "parse_circuit",
    "pattern_circuit",
    "pauli_z_compatible",
    "pec_estimate",
    "rbs_sequence",
    "read_gain_csv",
    "required_samples",
    "run_gain_experiment",
    "save_circuit",
    "serialize_circuit",
    "taylor_inverse",
    "unitary_of",
    "write_gain_csv",
]
