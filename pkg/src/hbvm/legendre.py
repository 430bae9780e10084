"""Shifted Legendre polynomials on [0,1] and Gauss-Lobatto quadrature rules.

The polynomials P_n used throughout are normalized so that P_n(1) = 1 and
int_0^1 P_n P_m dx = delta_nm / (2n+1).
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LobattoRule",
    "eval_legendre",
    "eval_legendre_deriv",
    "integrate_legendre",
    "lobatto_rule",
]


@dataclass(frozen=True, eq=False)
class LobattoRule:
    """A (k+1)-point Gauss-Lobatto quadrature rule on [0,1].

    Nodes include both endpoints and the rule integrates polynomials of
    degree up to 2k-1 exactly.  Nodes and weights are symmetric about 1/2.
    """

    npoints: int
    nodes: np.ndarray
    weights: np.ndarray


def eval_legendre(n: int, x):
    """Evaluate P_n(x) via the three-term recurrence.

    Accepts a scalar or an ndarray; the return type follows the input.
    """
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    t = 2.0 * np.asarray(x, dtype=float) - 1.0
    p_prev = np.zeros_like(t)  # P_{-1}
    p = np.ones_like(t)        # P_0
    for j in range(n):
        p, p_prev = ((2 * j + 1) * t * p - j * p_prev) / (j + 1), p
    return p if np.ndim(x) else float(p)


def eval_legendre_deriv(n: int, x):
    """Evaluate P_n'(x).

    Uses the recurrence P'_{j+1} = P'_{j-1} + 2(2j+1) P_j, which stays
    regular at the interval endpoints.
    """
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    t = 2.0 * np.asarray(x, dtype=float) - 1.0
    v_prev, v = np.zeros_like(t), np.ones_like(t)  # P_{-1}, P_0
    d_prev, d = np.zeros_like(t), np.zeros_like(t)  # P'_{-1}, P'_0
    for j in range(n):
        v_next = ((2 * j + 1) * t * v - j * v_prev) / (j + 1)
        d_next = d_prev + 2 * (2 * j + 1) * v
        v_prev, v = v, v_next
        d_prev, d = d, d_next
    return d if np.ndim(x) else float(d)


def integrate_legendre(n: int, x):
    """Return int_0^x P_n(t) dt in closed form.

    For n >= 1 the primitive is (P_{n+1} - P_{n-1}) / (2(2n+1)), which
    vanishes identically at x = 0 and x = 1 (exactly, also in floats).
    """
    if n < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if n == 0:
        x = np.asarray(x, dtype=float)
        return x if x.ndim else float(x)
    hi = eval_legendre(n + 1, x)
    lo = eval_legendre(n - 1, x)
    return (hi - lo) / (2 * (2 * n + 1))


def lobatto_rule(k: int) -> LobattoRule:
    """Construct the (k+1)-point Gauss-Lobatto rule on [0,1].

    The nodes are the zeros of (x^2-x) P_k'(x); the interior ones are found
    by Newton iteration on that polynomial (whose derivative is exactly
    k(k+1) P_k by the Legendre ODE), started from Chebyshev-Gauss-Lobatto
    points.  The weights are b_i = 1 / (k(k+1) P_k(t_i)^2).  Nodes and
    weights are symmetrized so that t_i + t_{k-i} = 1 and b_i = b_{k-i}
    hold bit-exactly.
    """
    if k < 1:
        raise ValueError("a Lobatto rule needs k >= 1")
    nodes = np.empty(k + 1)
    nodes[0], nodes[k] = 0.0, 1.0
    for i in range(1, k):
        x = 0.5 * (1.0 - math.cos(math.pi * i / k))
        for _ in range(100):
            g = (x * x - x) * eval_legendre_deriv(k, x)
            step = g / (k * (k + 1) * eval_legendre(k, x))
            x -= step
            if abs(step) <= 1e-15:
                break
        else:
            raise RuntimeError(f"Lobatto node {i} of rule k={k} did not converge")
        nodes[i] = x
    nodes = 0.5 * (nodes + 1.0 - nodes[::-1])
    weights = 1.0 / (k * (k + 1) * eval_legendre(k, nodes) ** 2)
    weights = 0.5 * (weights + weights[::-1])
    return LobattoRule(k + 1, nodes, weights)
