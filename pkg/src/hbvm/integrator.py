"""One-step HBVM solver in Legendre-coefficient space and a multi-step driver.

The stage polynomial derivative is expanded as sigma'(t) = sum_j gamma_j P_j(t)
with s vector coefficients, so each step solves an s*2m dimensional fixed
point regardless of k.  A direct solve of the full (k+1)-stage Runge-Kutta
system is also provided as a cross-check oracle.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hamiltonians import CanonicalSystem, apply_J
from .legendre import lobatto_rule
from .tableau import ButcherTableau, _basis_matrices

__all__ = [
    "SolverOptions",
    "StageCoefficients",
    "StepDiagnostics",
    "Trajectory",
    "ConvergenceError",
    "hbvm_step",
    "full_tableau_step",
    "integrate",
    "adjoint_consistency_check",
    "per_step_energy_error",
]

MODES = ("fixed_point", "newton_like")


class ConvergenceError(RuntimeError):
    """Stage iteration failed to reach tolerance; the step is rejected."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class SolverOptions:
    """Nonlinear stage solver configuration.

    tolerance applies to the max-norm of the coefficient increment, scaled
    by 1 + |y_0|_inf.  newton_like freezes the vector-field Jacobian at y_0,
    which keeps stiff problems (FPU with omega = 50) convergent.
    """

    mode: str = "fixed_point"
    tolerance: float = 1e-13
    max_iterations: int = 100

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True, eq=False)
class StageCoefficients:
    """The s block coefficients gamma_0..gamma_{s-1} of sigma'(t), rows of gamma."""

    gamma: np.ndarray


@dataclass(frozen=True, eq=False)
class StepDiagnostics:
    iterations: int
    residual: float
    stages: StageCoefficients


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A completed constant-stepsize integration.

    All arrays have length n_steps + 1; energy_error[n] = |H(y_n) - H(y_0)|
    and solver_iterations[n] counts stage iterations of step n (0 for the
    initial point).
    """

    times: np.ndarray
    states: np.ndarray
    energy_error: np.ndarray
    solver_iterations: np.ndarray


@lru_cache(maxsize=None)
def _stage_basis(k: int, s: int):
    """Cached per-(k,s) stage data: nodes, weights, integrals I and update W.

    W = D_s P^T Omega maps stage derivatives to coefficients; I maps
    coefficients to stage increments.  The tableau matrix is C = I W.
    """
    rule = lobatto_rule(k)
    I, P, D = _basis_matrices(rule.nodes, s)
    W = D[:, None] * P.T * rule.weights
    for arr in (rule.nodes, rule.weights, I, W):
        arr.setflags(write=False)
    return rule.nodes, rule.weights, I, W


def _vector_field(system: CanonicalSystem, Y: np.ndarray) -> np.ndarray:
    """Rows of J grad H evaluated at the stage rows of Y."""
    if system.vectorized:
        return apply_J(system.gradient(Y))
    return np.stack([apply_J(system.gradient(row)) for row in Y])


def _frozen_field_jacobian(system: CanonicalSystem, y0: np.ndarray) -> np.ndarray:
    """J times the Hessian of H at y0, by central differences of the gradient."""
    d = y0.size
    m = d // 2
    hess = np.empty((d, d))
    for j in range(d):
        eps = 1e-6 * (1.0 + abs(y0[j]))
        e = np.zeros(d)
        e[j] = eps
        hess[:, j] = (system.gradient(y0 + e) - system.gradient(y0 - e)) / (2 * eps)
    return np.concatenate([hess[m:], -hess[:m]], axis=0)


def hbvm_step(
    tab: ButcherTableau,
    system: CanonicalSystem,
    y0,
    h: float,
    opts: SolverOptions | None = None,
    initial_gamma: np.ndarray | None = None,
):
    """Advance one step of size h from y0; returns (y1, diagnostics).

    Solves gamma_j = (2j+1) sum_i b_i P_j(t_i) f(Y_i) with stages
    Y_i = y0 + h sum_l gamma_l int_0^{t_i} P_l, then y1 = Y_k = y0 + h gamma_0.
    Raises ConvergenceError when the iteration does not reach tolerance.
    """
    opts = opts or SolverOptions()
    y0 = np.asarray(y0, dtype=float)
    if y0.size != 2 * system.m:
        raise ValueError(f"state length {y0.size} does not match system dimension {2 * system.m}")
    _, _, I, W = _stage_basis(tab.k, tab.s)
    s, d = tab.s, y0.size
    scale = 1.0 + np.max(np.abs(y0))

    if initial_gamma is None:
        gamma = np.zeros((s, d))
        gamma[0] = apply_J(system.gradient(y0))  # constant-derivative predictor
    else:
        gamma = np.array(initial_gamma, dtype=float)

    newton_matrix = None
    if opts.mode == "newton_like":
        jac = _frozen_field_jacobian(system, y0)
        newton_matrix = np.eye(s * d) - h * np.kron(W @ I, jac)

    residual = np.inf
    for iteration in range(1, opts.max_iterations + 1):
        Y = y0 + h * (I @ gamma)
        target = W @ _vector_field(system, Y)
        if newton_matrix is None:
            delta = target - gamma
            gamma = target
        else:
            delta = np.linalg.solve(newton_matrix, (target - gamma).reshape(-1)).reshape(s, d)
            gamma = gamma + delta
        residual = float(np.max(np.abs(delta)))
        if residual <= opts.tolerance * scale:
            y1 = y0 + h * gamma[0]
            return y1, StepDiagnostics(iteration, residual, StageCoefficients(gamma))
    raise ConvergenceError(
        f"stage iteration did not converge in {opts.max_iterations} iterations "
        f"(residual {residual:.3e}, h={h})",
        opts.max_iterations,
        residual,
    )


def full_tableau_step(
    tab: ButcherTableau,
    system: CanonicalSystem,
    y0,
    h: float,
    opts: SolverOptions | None = None,
):
    """Direct solve of the full (k+1)-stage system Y = y0 + h C f(Y).

    Cross-check oracle for hbvm_step: both solve the same nonlinear system,
    this one without the rank-s reduction.  Returns (y1, iterations).
    """
    opts = opts or SolverOptions()
    y0 = np.asarray(y0, dtype=float)
    n, d = tab.k + 1, y0.size
    scale = 1.0 + np.max(np.abs(y0))
    C = tab.C

    # Euler predictor along the nodes
    Y = y0 + h * np.outer(tab.nodes, apply_J(system.gradient(y0)))

    newton_matrix = None
    if opts.mode == "newton_like":
        jac = _frozen_field_jacobian(system, y0)
        newton_matrix = np.eye(n * d) - h * np.kron(C, jac)

    for iteration in range(1, opts.max_iterations + 1):
        target = y0 + h * (C @ _vector_field(system, Y))
        if newton_matrix is None:
            delta = target - Y
            Y = target
        else:
            delta = np.linalg.solve(newton_matrix, (target - Y).reshape(-1)).reshape(n, d)
            Y = Y + delta
        residual = float(np.max(np.abs(delta)))
        if residual <= opts.tolerance * scale:
            return Y[-1], iteration
    raise ConvergenceError(
        f"full-stage iteration did not converge in {opts.max_iterations} iterations",
        opts.max_iterations,
        float(np.max(np.abs(delta))),
    )


def integrate(
    tab: ButcherTableau,
    system: CanonicalSystem,
    y0,
    h: float,
    n_steps: int,
    opts: SolverOptions | None = None,
) -> Trajectory:
    """Run n_steps constant-stepsize steps from y0; fails fast on divergence."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    y0 = np.asarray(y0, dtype=float)
    states = np.empty((n_steps + 1, y0.size))
    states[0] = y0
    iterations = np.zeros(n_steps + 1, dtype=int)
    y = y0
    for n in range(n_steps):
        y, diag = hbvm_step(tab, system, y, h, opts)
        states[n + 1] = y
        iterations[n + 1] = diag.iterations
    times = h * np.arange(n_steps + 1)
    if system.vectorized:
        energies = system.hamiltonian(states)
    else:
        energies = np.array([system.hamiltonian(row) for row in states])
    return Trajectory(times, states, np.abs(energies - energies[0]), iterations)


def adjoint_consistency_check(
    tab: ButcherTableau,
    system: CanonicalSystem,
    y0,
    h: float,
    opts: SolverOptions | None = None,
) -> float:
    """Residual |step(step(y0, h), -h) - y0|; near zero for symmetric methods."""
    y1, _ = hbvm_step(tab, system, y0, h, opts)
    y2, _ = hbvm_step(tab, system, y1, -h, opts)
    return float(np.max(np.abs(y2 - np.asarray(y0, dtype=float))))


def per_step_energy_error(
    tab: ButcherTableau,
    system: CanonicalSystem,
    y0,
    h: float,
    opts: SolverOptions | None = None,
) -> float:
    """|H(y1) - H(y0)| for a single converged step from y0."""
    y0 = np.asarray(y0, dtype=float)
    y1, _ = hbvm_step(tab, system, y0, h, opts)
    return float(abs(system.hamiltonian(y1) - system.hamiltonian(y0)))
