"""Energy-preserving Runge-Kutta integrators (HBVMs) for canonical
Hamiltonian systems.

An HBVM(k,s) uses k+1 Lobatto stages with a degree-s stage polynomial: it
has order 2s, is symmetric and precisely A-stable, and exactly conserves
polynomial Hamiltonians of degree up to 2k/s.
"""

__version__ = "0.1.0"

from .hamiltonians import (
    PROBLEMS,
    CanonicalSystem,
    apply_J,
    finite_difference_gradient,
    get_problem,
    problem_biot,
    problem_fhp,
    problem_fpu,
    problem_harmonic,
)
from .harness import (
    ConvergenceReport,
    DriftResult,
    GridCompatibilityError,
    convergence_study,
    drift_experiment,
    fit_drift_slope,
    fitted_order,
)
from .integrator import (
    ConvergenceError,
    SolverOptions,
    StageCoefficients,
    StepDiagnostics,
    Trajectory,
    adjoint_consistency_check,
    full_tableau_step,
    hbvm_step,
    integrate,
    per_step_energy_error,
)
from .legendre import (
    LobattoRule,
    eval_legendre,
    eval_legendre_deriv,
    integrate_legendre,
    lobatto_rule,
)
from .tableau import (
    BlockPencil,
    ButcherTableau,
    SimplifyingConditions,
    block_pencil,
    check_simplifying_conditions,
    check_symmetry,
    coefficient_rank,
    default_fundamental_indices,
    hbvm_tableau,
    lobatto_iiia_tableau,
    stability_function,
    tableau_from_json,
    tableau_to_csv,
    tableau_to_json,
)

__all__ = [
    "__version__",
    # legendre
    "LobattoRule", "eval_legendre", "eval_legendre_deriv", "integrate_legendre",
    "lobatto_rule",
    # tableau
    "ButcherTableau", "BlockPencil", "SimplifyingConditions", "hbvm_tableau",
    "lobatto_iiia_tableau", "block_pencil", "default_fundamental_indices",
    "check_simplifying_conditions", "check_symmetry", "stability_function",
    "coefficient_rank", "tableau_to_json", "tableau_from_json", "tableau_to_csv",
    # hamiltonians
    "CanonicalSystem", "apply_J", "finite_difference_gradient", "problem_fhp",
    "problem_fpu", "problem_biot", "problem_harmonic", "PROBLEMS", "get_problem",
    # integrator
    "SolverOptions", "StageCoefficients", "StepDiagnostics", "Trajectory",
    "ConvergenceError", "hbvm_step", "full_tableau_step", "integrate",
    "adjoint_consistency_check", "per_step_energy_error",
    # harness
    "ConvergenceReport", "DriftResult", "GridCompatibilityError",
    "convergence_study", "drift_experiment", "fit_drift_slope", "fitted_order",
]
