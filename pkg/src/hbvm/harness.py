"""Experiment harness: convergence studies and energy-drift experiments.

Error estimates follow the difference-of-consecutive-solutions convention:
the error attributed to stepsize h is the max-norm difference between the
h run and the h/2 run, sampled on the coarse time grid.
"""

from dataclasses import dataclass

import numpy as np

from .hamiltonians import CanonicalSystem, get_problem
from .integrator import SolverOptions, Trajectory, integrate
from .tableau import hbvm_tableau

__all__ = [
    "ConvergenceReport",
    "DriftResult",
    "GridCompatibilityError",
    "convergence_study",
    "drift_experiment",
    "fit_drift_slope",
    "fitted_order",
    "DEFAULT_T_END",
]


class GridCompatibilityError(ValueError):
    """The requested horizon cannot be covered by the requested stepsizes."""


# Default study horizons, chosen so that the coarsest level of the standard
# refinement studies sits in the asymptotic regime while the finest stays
# clear of round-off.  CLI-overridable; realized horizons are recorded in
# every report.
DEFAULT_T_END = {"fhp": 50.0, "fpu": 1.0, "biot": 20.0, "harmonic": 10.0}


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Per-stepsize error estimates and fitted orders of a refinement study.

    errors[i] compares the runs at stepsizes[i] and stepsizes[i]/2;
    orders[i] = log2(errors[i] / errors[i+1]), one entry shorter.
    horizons records the realized integration horizon of each reported run
    (n h with n = round(t_end / h), which can differ from t_end when t_end
    is not a multiple of h).
    """

    stepsizes: np.ndarray
    errors: np.ndarray
    orders: np.ndarray
    horizons: np.ndarray


@dataclass(frozen=True, eq=False)
class DriftResult:
    """Energy series H(y_n) - H(y_0) of a run plus its least-squares slope."""

    steps: np.ndarray
    times: np.ndarray
    energy_delta: np.ndarray
    slope: float


def _resolve(problem) -> CanonicalSystem:
    if isinstance(problem, CanonicalSystem):
        return problem
    return get_problem(problem)


def _steps_for(t_end: float, h: float) -> int:
    n = int(round(t_end / h))
    if n < 1:
        raise GridCompatibilityError(
            f"horizon t_end={t_end} is shorter than one step of h={h}"
        )
    return n


def convergence_study(
    k: int,
    s: int,
    problem,
    h0: float,
    levels: int,
    t_end: float,
    opts: SolverOptions | None = None,
) -> ConvergenceReport:
    """Halving study with `levels` reported stepsizes h0, h0/2, ...

    Runs levels+1 integrations (the extra, finest run serves as reference
    for the last error estimate).  problem is a CanonicalSystem or a
    registry name.
    """
    if levels < 2:
        raise ValueError("need at least 2 levels")
    if h0 <= 0 or t_end <= 0:
        raise ValueError("h0 and t_end must be positive")
    system = _resolve(problem)
    tab = hbvm_tableau(k, s)
    stepsizes = h0 / 2.0 ** np.arange(levels)
    trajectories: list[Trajectory] = []
    horizons = np.empty(levels)
    for i in range(levels + 1):
        h = h0 / 2.0**i
        n = _steps_for(t_end, h)
        trajectories.append(integrate(tab, system, system.y0, h, n, opts))
        if i < levels:
            horizons[i] = n * h
    errors = np.empty(levels)
    for i in range(levels):
        coarse, fine = trajectories[i], trajectories[i + 1]
        j_max = min(len(coarse.states) - 1, (len(fine.states) - 1) // 2)
        diff = coarse.states[: j_max + 1] - fine.states[: 2 * j_max + 1 : 2]
        errors[i] = np.max(np.abs(diff))
    orders = np.log2(errors[:-1] / errors[1:])
    return ConvergenceReport(stepsizes, errors, orders, horizons)


def fit_drift_slope(times: np.ndarray, energy_delta: np.ndarray, skip: int = 10) -> float:
    """Ordinary least-squares slope of the energy series versus time.

    The first `skip` steps are discarded to remove the initial transient
    (kept when the series is too short for that).
    """
    if len(times) <= skip + 2:
        skip = 0
    return float(np.polyfit(times[skip:], energy_delta[skip:], 1)[0])


def drift_experiment(
    k: int,
    s: int,
    problem,
    h: float,
    n_steps: int,
    opts: SolverOptions | None = None,
) -> DriftResult:
    """Integrate n_steps steps and report the signed energy error series.

    The fitted slope quantifies secular drift: energy-preserving methods
    give slopes at round-off level, a drifting method gives |slope| > 0
    clearly above it.
    """
    system = _resolve(problem)
    tab = hbvm_tableau(k, s)
    trajectory = integrate(tab, system, system.y0, h, n_steps, opts)
    if system.vectorized:
        energies = system.hamiltonian(trajectory.states)
    else:
        energies = np.array([system.hamiltonian(row) for row in trajectory.states])
    delta = energies - energies[0]
    slope = fit_drift_slope(trajectory.times, delta)
    return DriftResult(np.arange(n_steps + 1), trajectory.times, delta, slope)


def fitted_order(report: ConvergenceReport) -> float:
    """Least-squares slope of log2(error) against log2(h) over all levels."""
    return float(np.polyfit(np.log2(report.stepsizes), np.log2(report.errors), 1)[0])
