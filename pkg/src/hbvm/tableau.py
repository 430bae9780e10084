"""HBVM(k,s) Runge-Kutta tableaux, the underlying block pencil, and validators.

An HBVM(k,s) advances the solution with k+1 Lobatto stages but an underlying
polynomial of degree s, so its (k+1)x(k+1) coefficient matrix has rank s.
For k = s the construction reduces to the classical Lobatto IIIA method.
"""

import json
from dataclasses import dataclass

import numpy as np

from .legendre import eval_legendre, integrate_legendre, lobatto_rule

__all__ = [
    "ButcherTableau",
    "BlockPencil",
    "SimplifyingConditions",
    "hbvm_tableau",
    "lobatto_iiia_tableau",
    "block_pencil",
    "default_fundamental_indices",
    "check_simplifying_conditions",
    "check_symmetry",
    "stability_function",
    "coefficient_rank",
    "tableau_to_json",
    "tableau_from_json",
    "tableau_to_csv",
]


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Runge-Kutta tableau of an HBVM(k,s) or Lobatto IIIA method.

    nodes and weights are the k+1 Lobatto abscissae/weights on [0,1]; C is
    the (k+1)x(k+1) coefficient matrix.  The first row of C is zero and the
    last row equals the weights (stiffly accurate).
    """

    k: int
    s: int
    nodes: np.ndarray
    weights: np.ndarray
    C: np.ndarray

    @property
    def r(self) -> int:
        """Number of silent stages, k - s."""
        return self.k - self.s


@dataclass(frozen=True, eq=False)
class BlockPencil:
    """Block pencil (A, B) form of an HBVM(k,s).

    A and B are k x (k+1); the one-step map is A yhat = h B f(yhat) with
    yhat = (y_0, ..., y_k).  Rows s+1..k of B are zero (silent-stage
    interpolation rows).
    """

    A: np.ndarray
    B: np.ndarray
    fundamental_indices: np.ndarray
    silent_indices: np.ndarray


@dataclass(frozen=True)
class SimplifyingConditions:
    """Largest q for which each of B(q), C(q), D(q) holds."""

    B_order: int
    C_order: int
    D_order: int


def _basis_matrices(nodes: np.ndarray, s: int):
    """Stage basis evaluated at the given nodes.

    Returns (I, P, D) with I[i,l] = int_0^{t_i} P_l, P[i,l] = P_l(t_i) and
    D = (1, 3, ..., 2s-1).
    """
    I = np.column_stack([integrate_legendre(l, nodes) for l in range(s)])
    P = np.column_stack([eval_legendre(l, nodes) for l in range(s)])
    D = np.arange(1, 2 * s, 2, dtype=float)
    return I, P, D


def hbvm_tableau(k: int, s: int) -> ButcherTableau:
    """Construct the HBVM(k,s) tableau on the k+1 Lobatto abscissae.

    C[i,j] = sum_{l<s} (2l+1) (int_0^{t_i} P_l) P_l(t_j) b_j; the matrix has
    rank s.  For s = 1 this is the rank-one outer product nodes * weights^T,
    and for s = k it coincides with Lobatto IIIA.
    """
    if s < 1 or s > k:
        raise ValueError(f"need 1 <= s <= k, got k={k}, s={s}")
    rule = lobatto_rule(k)
    I, P, D = _basis_matrices(rule.nodes, s)
    C = (I * D) @ (P.T * rule.weights)
    return ButcherTableau(k, s, rule.nodes, rule.weights, C)


def lobatto_iiia_tableau(s: int) -> ButcherTableau:
    """Classical Lobatto IIIA collocation tableau on s+1 Lobatto nodes.

    Built independently of the HBVM route: entry (i,j) is the exact integral
    int_0^{c_i} L_j(x) dx of the Lagrange basis, via polynomial coefficients.
    Serves as a cross-check oracle for hbvm_tableau(s,s).
    """
    if s < 1:
        raise ValueError("need s >= 1")
    rule = lobatto_rule(s)
    c = rule.nodes
    C = np.empty((s + 1, s + 1))
    for j in range(s + 1):
        others = np.delete(c, j)
        coeffs = np.poly(others) / np.prod(c[j] - others)
        antideriv = np.polyint(coeffs)
        C[:, j] = np.polyval(antideriv, c)
    return ButcherTableau(s, s, c, rule.weights, C)


def default_fundamental_indices(k: int, s: int) -> np.ndarray:
    """Evenly spread choice {0, round(k/s), ..., k} of fundamental stages."""
    return np.array([round(j * k / s) for j in range(s + 1)], dtype=int)


def block_pencil(k: int, s: int, fundamental_indices=None) -> BlockPencil:
    """Build the block pencil (A, B) of HBVM(k,s).

    fundamental_indices selects which s+1 of the k+1 Lobatto abscissae carry
    the interpolation unknowns; it must be strictly increasing and contain 0
    and k.  The remaining r = k-s abscissae are the silent stages.  The
    induced one-step method does not depend on the choice.
    """
    if s < 1 or s > k:
        raise ValueError(f"need 1 <= s <= k, got k={k}, s={s}")
    if fundamental_indices is None:
        fundamental_indices = default_fundamental_indices(k, s)
    ind_s = np.asarray(fundamental_indices, dtype=int)
    if ind_s.shape != (s + 1,) or np.any(np.diff(ind_s) <= 0):
        raise ValueError("fundamental_indices must be s+1 strictly increasing entries")
    if ind_s[0] != 0 or ind_s[-1] != k:
        raise ValueError("fundamental_indices must contain 0 and k")
    ind_r = np.setdiff1d(np.arange(k + 1), ind_s)
    r = k - s

    rule = lobatto_rule(k)
    t, b = rule.nodes, rule.weights
    _, P, D = _basis_matrices(t, s)
    # integrals of the basis at the fundamental abscissae c_1..c_s (square)
    # and at the silent abscissae tau_1..tau_r
    I_fund = np.column_stack([integrate_legendre(l, t[ind_s[1:]]) for l in range(s)])
    A = np.zeros((k, k + 1))
    B = np.zeros((k, k + 1))
    for i in range(s):
        A[i, ind_s[0]] = -1.0
        A[i, ind_s[i + 1]] = 1.0
    B[:s, :] = (I_fund * D) @ (P.T * b)
    if r:
        I_sil = np.column_stack([integrate_legendre(l, t[ind_r]) for l in range(s)])
        interp = np.linalg.solve(I_fund, np.hstack([-np.ones((s, 1)), np.eye(s)]))
        A_sil = -I_sil @ interp
        A_sil[:, 0] -= 1.0
        A[s:, ind_r] = np.eye(r)
        A[s:, ind_s] = A_sil
    return BlockPencil(A, B, ind_s, ind_r)


def check_simplifying_conditions(tab: ButcherTableau, tol: float = 1e-11) -> SimplifyingConditions:
    """Largest q for which the order conditions B(q), C(q), D(q) hold.

    B(q): sum_i b_i t_i^{p-1} = 1/p,
    C(q): sum_j C_ij t_j^{p-1} = t_i^p / p,
    D(q): sum_i b_i t_i^{p-1} C_ij = b_j (1 - t_j^p) / p,  all for p = 1..q.
    HBVM(k,s) satisfies B(2k), C(s) and D(s-1).
    """
    t, b, C = tab.nodes, tab.weights, tab.C
    qmax = 2 * tab.k + 2

    def holds_B(p):
        return abs(b @ t ** (p - 1) - 1.0 / p) <= tol

    def holds_C(p):
        return np.max(np.abs(C @ t ** (p - 1) - t**p / p)) <= tol

    def holds_D(p):
        return np.max(np.abs((b * t ** (p - 1)) @ C - b * (1.0 - t**p) / p)) <= tol

    orders = []
    for holds in (holds_B, holds_C, holds_D):
        q = 0
        while q < qmax and holds(q + 1):
            q += 1
        orders.append(q)
    return SimplifyingConditions(*orders)


def check_symmetry(tab: ButcherTableau) -> float:
    """Max-norm residual of the self-adjointness identity on the tableau.

    With L the k x (k+1) forward-difference matrix, a method on symmetric
    abscissae satisfies flip(L C) = L C, where flip reverses both row and
    column order.  HBVM tableaux give residuals at round-off level.
    """
    k = tab.k
    L = np.eye(k, k + 1, k=1) - np.eye(k, k + 1)
    LC = L @ tab.C
    return float(np.max(np.abs(LC[::-1, ::-1] - LC)))


def stability_function(tab: ButcherTableau, z: complex) -> complex:
    """Evaluate R(z) = 1 + z b^T (I - zC)^{-1} 1.

    Raises numpy.linalg.LinAlgError when z is a pole of R.
    """
    n = tab.k + 1
    x = np.linalg.solve(np.eye(n) - z * tab.C, np.ones(n))
    return complex(1.0 + z * (tab.weights @ x))


def coefficient_rank(tab: ButcherTableau, rtol: float = 1e-12) -> int:
    """Numerical rank of C from its singular values (relative threshold)."""
    sv = np.linalg.svd(tab.C, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


def _fmt(x: float) -> str:
    # 17 significant digits round-trip binary64 exactly
    return format(x, ".17g")


def tableau_to_json(tab: ButcherTableau) -> str:
    """Serialize a tableau to JSON with 17-significant-digit numbers."""
    nodes = ", ".join(_fmt(v) for v in tab.nodes)
    weights = ", ".join(_fmt(v) for v in tab.weights)
    rows = ",\n    ".join("[" + ", ".join(_fmt(v) for v in row) + "]" for row in tab.C)
    return (
        "{\n"
        f'  "k": {tab.k},\n'
        f'  "s": {tab.s},\n'
        f'  "nodes": [{nodes}],\n'
        f'  "weights": [{weights}],\n'
        f'  "C": [\n    {rows}\n  ]\n'
        "}"
    )


def tableau_from_json(text: str) -> ButcherTableau:
    """Rebuild a tableau from its JSON export (bit-exact round trip)."""
    obj = json.loads(text)
    return ButcherTableau(
        int(obj["k"]),
        int(obj["s"]),
        np.asarray(obj["nodes"], dtype=float),
        np.asarray(obj["weights"], dtype=float),
        np.asarray(obj["C"], dtype=float),
    )


def tableau_to_csv(tab: ButcherTableau) -> str:
    """Serialize a tableau as CSV with header i,t,b,C_0..C_k."""
    header = "i,t,b," + ",".join(f"C_{j}" for j in range(tab.k + 1))
    lines = [header]
    for i in range(tab.k + 1):
        fields = [str(i), _fmt(tab.nodes[i]), _fmt(tab.weights[i])]
        fields += [_fmt(v) for v in tab.C[i]]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
