"""Local-hidden-variable models for Bell experiments with inefficient
detectors: efficiency thresholds, exact model constructions that reproduce
quantum correlations below them, and Monte Carlo verification tooling.
"""

from .bounds import (
    SymmetrizationSolution,
    eta_all_click,
    eta_dimension,
    eta_multiparty,
    eta_two_party,
    solve_symmetrization,
    solve_threshold_angle,
)
from .dimension import (
    DimensionModelParams,
    DimensionModelReport,
    alice_respond,
    bob_respond,
    run_dimension_model,
    symmetrized_efficiency,
)
from .errors import (
    ConsistencyError,
    DomainError,
    InvariantViolation,
    LhvError,
    ScenarioFormatError,
    SizeGuardExceeded,
    StructuralError,
    ZeroFiringError,
)
from .multiparty import (
    ClickPatternProbabilities,
    MultipartyModel,
    ProtocolMixture,
    ScanRow,
    build_multiparty_model,
    mixture_from_recursion,
    positivity_scan,
    protocol_click_probabilities,
    q_i_k,
    q_prime,
    recursion_r,
    solve_weights,
)
from .quantum import (
    NO_CLICK,
    OutcomeDistribution,
    Povm,
    PovmValidationReport,
    QuantumState,
    RankOnePovmElement,
    Scenario,
    conjugate_in_schmidt_basis,
    extend_with_inefficiency,
    ghz_state,
    haar_random_state,
    joint_outcome_table,
    load_scenario,
    maximally_entangled,
    projective_povm,
    quantum_distribution,
    quantum_joint,
    refine_to_rank_one,
    scenario_from_json,
    scenario_to_json,
    subset_joint_table,
    validate_povm,
)
from .two_party import TwoPartyHiddenVariable, TwoPartyModel, build_exact_distribution
from .verify import ComparisonReport, compare_exact, compare_float, statistical_match, tv_distance

__version__ = "0.1.0"

__all__ = [
    "ClickPatternProbabilities",
    "ComparisonReport",
    "ConsistencyError",
    "DimensionModelParams",
    "DimensionModelReport",
    "DomainError",
    "InvariantViolation",
    "LhvError",
    "MultipartyModel",
    "NO_CLICK",
    "OutcomeDistribution",
    "Povm",
    "PovmValidationReport",
    "ProtocolMixture",
    "QuantumState",
    "RankOnePovmElement",
    "ScanRow",
    "Scenario",
    "ScenarioFormatError",
    "SizeGuardExceeded",
    "StructuralError",
    "SymmetrizationSolution",
    "TwoPartyHiddenVariable",
    "TwoPartyModel",
    "ZeroFiringError",
    "alice_respond",
    "bob_respond",
    "build_exact_distribution",
    "build_multiparty_model",
    "compare_exact",
    "compare_float",
    "conjugate_in_schmidt_basis",
    "eta_all_click",
    "eta_dimension",
    "eta_multiparty",
    "eta_two_party",
    "extend_with_inefficiency",
    "ghz_state",
    "haar_random_state",
    "joint_outcome_table",
    "load_scenario",
    "maximally_entangled",
    "mixture_from_recursion",
    "positivity_scan",
    "projective_povm",
    "protocol_click_probabilities",
    "q_i_k",
    "q_prime",
    "quantum_distribution",
    "quantum_joint",
    "recursion_r",
    "refine_to_rank_one",
    "run_dimension_model",
    "scenario_from_json",
    "scenario_to_json",
    "solve_symmetrization",
    "solve_threshold_angle",
    "solve_weights",
    "statistical_match",
    "subset_joint_table",
    "symmetrized_efficiency",
    "tv_distance",
    "validate_povm",
]
