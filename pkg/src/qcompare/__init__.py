"""Simulation and falsification harness for one-sided quantum comparison machines."""

from .core import (
    AntiLinearMap,
    DimensionMismatchError,
    NormalizationError,
    Operator,
    QubitMeasurement,
    SingularMapError,
    StateVector,
    apply,
    apply_antilinear,
    apply_to_factors,
    basis_state,
    conjugation_map,
    haar_state,
    haar_unitary,
    inner,
    k_image,
    measure_qubit,
    orthogonal_qubit_map,
    partial_trace,
    tensor,
    zero_state,
)
from .machines import (
    DecisionMachine,
    OneSidednessReport,
    OutcomeDistribution,
    always_no_machine,
    always_yes_machine,
    build_k_comparison_machine,
    build_swap_test_machine,
    classify_one_sidedness,
    evaluate,
    matched_partner,
    sample_matched_pair,
    sample_mismatched_pair,
    swap_test_probability,
)
from .verifier import (
    BranchDecomposition,
    ProbeSet,
    VerificationReport,
    build_probe_set,
    case2_bound_constant,
    CASE1_BOUND_CONSTANT,
    exactly_constrained_machine,
    extract_branches,
    nontriviality,
    one_sided_violation,
    perturbed_machine,
    verify_case1,
    verify_case2,
)
from .search import SearchResult, adversarial_search
from .cloning import (
    Cloner,
    GameResult,
    run_game,
    sample_game,
    trivial_cloner,
    universal_cloner,
)

__version__ = "0.1.0"
