"""Canonical Hamiltonian benchmark problems with analytic gradients.

States are ordered y = (q_1..q_m, p_1..p_m), so that the canonical equations
read q' = dH/dp, p' = -dH/dq.  All packaged Hamiltonians and gradients accept
arrays of shape (..., 2m) and broadcast over leading axes.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "CanonicalSystem",
    "apply_J",
    "finite_difference_gradient",
    "problem_fhp",
    "problem_fpu",
    "problem_biot",
    "problem_harmonic",
    "PROBLEMS",
    "get_problem",
]


@dataclass(frozen=True, eq=False)
class CanonicalSystem:
    """A Hamiltonian problem y' = J grad H(y) in canonical form.

    m is the half-dimension (the state has length 2m), poly_degree the
    polynomial degree of H when H is polynomial, and y0 the default initial
    state.  vectorized marks whether hamiltonian/gradient broadcast over
    leading axes; all packaged problems do.
    """

    name: str
    m: int
    hamiltonian: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    y0: np.ndarray
    poly_degree: Optional[int] = None
    vectorized: bool = False


def apply_J(v):
    """Apply the canonical structure matrix: (q, p) -> (p, -q).

    J is never materialized; works on any array with even last axis.
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] % 2:
        raise ValueError("state dimension must be even")
    m = v.shape[-1] // 2
    return np.concatenate([v[..., m:], -v[..., :m]], axis=-1)


def finite_difference_gradient(system: CanonicalSystem, y, step: float) -> np.ndarray:
    """Central-difference gradient of H, the oracle guarding analytic gradients."""
    if step <= 0:
        raise ValueError("step must be positive")
    y = np.asarray(y, dtype=float)
    g = np.empty_like(y)
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = step
        g[i] = (system.hamiltonian(y + e) - system.hamiltonian(y - e)) / (2 * step)
    return g


def problem_fhp() -> CanonicalSystem:
    """Degree-6 polynomial oscillator with a cubic kinetic term.

    H(q,p) = p^3/3 - p/2 + q^6/30 + q^4/4 - q^3/3 + 1/6, started at (0, 1).
    Known to exhibit energy drift under fourth-order Lobatto IIIA.
    """

    def hamiltonian(y):
        q, p = y[..., 0], y[..., 1]
        return p**3 / 3 - p / 2 + q**6 / 30 + q**4 / 4 - q**3 / 3 + 1 / 6

    def gradient(y):
        q, p = y[..., 0], y[..., 1]
        return np.stack([q**5 / 5 + q**3 - q**2, p**2 - 0.5], axis=-1)

    return CanonicalSystem(
        "fhp", 1, hamiltonian, gradient, np.array([0.0, 1.0]), poly_degree=6,
        vectorized=True,
    )


_FPU_OMEGA = 50.0


def problem_fpu() -> CanonicalSystem:
    """Fermi-Pasta-Ulam chain of three stiff springs, omega = 50.

    H = 1/2 sum p_i^2 + omega^2/4 sum (q_{2i} - q_{2i-1})^2
        + sum_{i=0}^{3} (q_{2i+1} - q_{2i})^4, with ghost values
    q_0 = q_7 = 0.  Quartic, i.e. poly_degree 4; the quadratic part makes
    the problem stiff.
    """
    om2 = _FPU_OMEGA**2
    stiff_hi, stiff_lo = [2, 4, 6], [1, 3, 5]
    soft_hi, soft_lo = [1, 3, 5, 7], [0, 2, 4, 6]

    def _extend(q):
        pad = np.zeros(q.shape[:-1] + (1,))
        return np.concatenate([pad, q, pad], axis=-1)

    def hamiltonian(y):
        q, p = y[..., :6], y[..., 6:]
        qx = _extend(q)
        stiff = qx[..., stiff_hi] - qx[..., stiff_lo]
        soft = qx[..., soft_hi] - qx[..., soft_lo]
        return (
            0.5 * np.sum(p**2, axis=-1)
            + 0.25 * om2 * np.sum(stiff**2, axis=-1)
            + np.sum(soft**4, axis=-1)
        )

    def gradient(y):
        q, p = y[..., :6], y[..., 6:]
        qx = _extend(q)
        stiff = qx[..., stiff_hi] - qx[..., stiff_lo]
        soft_cubed = 4.0 * (qx[..., soft_hi] - qx[..., soft_lo]) ** 3
        g = np.zeros_like(qx)
        g[..., stiff_hi] += 0.5 * om2 * stiff
        g[..., stiff_lo] -= 0.5 * om2 * stiff
        g[..., soft_hi] += soft_cubed
        g[..., soft_lo] -= soft_cubed
        return np.concatenate([g[..., 1:7], p], axis=-1)

    y0 = np.concatenate([np.arange(6) / 10.0, np.zeros(6)])
    return CanonicalSystem(
        "fpu", 6, hamiltonian, gradient, y0, poly_degree=4, vectorized=True,
    )


def problem_biot() -> CanonicalSystem:
    """Charged particle in a magnetic field with Biot-Savart potential.

    Non-polynomial Hamiltonian in (x, y, z) and conjugate momenta, singular
    on the axis rho = sqrt(x^2 + y^2) = 0.  Mass, charge and field strength
    are fixed to 1, -1, 1, so alpha = e B_0 = -1.
    """
    alpha = -1.0

    def _parts(y):
        x, yy = y[..., 0], y[..., 1]
        rho2 = x**2 + yy**2
        if np.any(rho2 == 0.0):
            raise ValueError("Biot-Savart potential is singular at rho = 0")
        u = y[..., 3] - alpha * x / rho2
        v = y[..., 4] - alpha * yy / rho2
        w = y[..., 5] + 0.5 * alpha * np.log(rho2)
        return x, yy, rho2, u, v, w

    def hamiltonian(y):
        _, _, _, u, v, w = _parts(y)
        return 0.5 * (u**2 + v**2 + w**2)

    def gradient(y):
        x, yy, rho2, u, v, w = _parts(y)
        rho4 = rho2**2
        dx = alpha * (-u * (yy**2 - x**2) / rho4 + 2 * x * yy * v / rho4 + w * x / rho2)
        dy = alpha * (2 * x * yy * u / rho4 - v * (x**2 - yy**2) / rho4 + w * yy / rho2)
        return np.stack([dx, dy, np.zeros_like(x), u, v, w], axis=-1)

    y0 = np.array([0.5, 10.0, 0.0, -0.1, -0.3, 0.0])
    return CanonicalSystem("biot", 3, hamiltonian, gradient, y0, vectorized=True)


def problem_harmonic() -> CanonicalSystem:
    """Harmonic oscillator H = (q^2 + p^2)/2; exact flow is a rotation."""

    def hamiltonian(y):
        return 0.5 * np.sum(y**2, axis=-1)

    def gradient(y):
        return np.array(y, dtype=float)

    return CanonicalSystem(
        "harmonic", 1, hamiltonian, gradient, np.array([1.0, 0.0]),
        poly_degree=2, vectorized=True,
    )


PROBLEMS = {
    "fhp": problem_fhp,
    "fpu": problem_fpu,
    "biot": problem_biot,
    "harmonic": problem_harmonic,
}


def get_problem(name: str) -> CanonicalSystem:
    """Look up a packaged problem by name."""
    try:
        return PROBLEMS[name]()
    except KeyError:
        known = ", ".join(sorted(PROBLEMS))
        raise ValueError(f"unknown problem {name!r}; known problems: {known}") from None
