"""pplab: pseudo-projection operators, pseudo-probability schemes, weak values.

Joint outcomes of non-commuting projective tests get operator-valued
stand-ins (symmetrized ordered products) whose expectations form normalized
but possibly negative probability schemes.  The package builds those
operators and schemes, decomposes each entry into a Born factor times a real
weak value, and runs a battery of nonclassicality tests on top of them, plus
a Gaussian-pointer simulation that shows how the negative entries surface in
a laboratory readout.
"""
from __future__ import annotations

from .errors import (
    ConvergenceError,
    FactorizationUndefinedError,
    InvalidInputError,
    PPLabError,
    PostSelectionImpossibleError,
    ResourceLimitError,
)
from .game import (
    GameState,
    StrategyReport,
    evaluate_strategy,
    evolve_scheme,
    game_score,
    scan_strategies,
    scheme_from_state,
    transition_matrix,
)
from .geometry import (
    Doublet,
    EntanglementGeometry,
    bloch_state,
    make_doublet,
    make_entanglement_geometry,
    mub_partner,
    pauli_vector,
    qubit_projector,
    werner_state,
)
from .operator_core import (
    DensityMatrix,
    Projector,
    anticommutator,
    expectation,
    partial_trace,
    resolve_tolerance,
    tensor_product,
)
from .pointer import (
    PointerConfig,
    PointerResult,
    perturbative_prediction,
    proportionality_check,
    simulate_pointers,
)
from .pseudoprojection import (
    PseudoProjection,
    conjunction_pp,
    convex_pp,
    disjunction_pp,
    min_eigen_certificate,
    symmetrized_pp,
    unit_pp,
)
from .scheme import (
    ObservableSpec,
    Scheme,
    build_scheme,
    equality_sum,
    marginalize,
    negativity_report,
    scheme_from_json,
    scheme_to_json,
)
from .weak import (
    WeakValueReport,
    hj_decompose,
    pp_weak_factorization,
    real_weak_product,
    weak_value,
)
from .witnesses import (
    TestReport,
    WeakTerm,
    boolean_state_dep_test,
    boolean_state_indep_test,
    chsh_test,
    coherence_test,
    discord_test,
    distributivity_test,
    linear_ent_test,
    nonlinear_ent_test,
    statistic_from_terms,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PPLabError",
    "InvalidInputError",
    "PostSelectionImpossibleError",
    "FactorizationUndefinedError",
    "ResourceLimitError",
    "ConvergenceError",
    "DensityMatrix",
    "Projector",
    "tensor_product",
    "anticommutator",
    "expectation",
    "partial_trace",
    "resolve_tolerance",
    "Doublet",
    "EntanglementGeometry",
    "bloch_state",
    "pauli_vector",
    "qubit_projector",
    "make_doublet",
    "make_entanglement_geometry",
    "mub_partner",
    "werner_state",
    "PseudoProjection",
    "unit_pp",
    "symmetrized_pp",
    "convex_pp",
    "conjunction_pp",
    "disjunction_pp",
    "min_eigen_certificate",
    "WeakValueReport",
    "weak_value",
    "real_weak_product",
    "hj_decompose",
    "pp_weak_factorization",
    "ObservableSpec",
    "Scheme",
    "build_scheme",
    "marginalize",
    "negativity_report",
    "equality_sum",
    "scheme_to_json",
    "scheme_from_json",
    "WeakTerm",
    "TestReport",
    "statistic_from_terms",
    "coherence_test",
    "boolean_state_dep_test",
    "boolean_state_indep_test",
    "distributivity_test",
    "chsh_test",
    "linear_ent_test",
    "nonlinear_ent_test",
    "discord_test",
    "PointerConfig",
    "PointerResult",
    "simulate_pointers",
    "perturbative_prediction",
    "proportionality_check",
    "GameState",
    "StrategyReport",
    "transition_matrix",
    "evolve_scheme",
    "game_score",
    "scheme_from_state",
    "evaluate_strategy",
    "scan_strategies",
]
