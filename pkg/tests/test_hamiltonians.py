import math

import numpy as np
import pytest

from hbvm.hamiltonians import (
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


def fd_gradient_scaled(system, y, base=1e-6):
    # per-coordinate central differences with step scaled by the state
    y = np.asarray(y, dtype=float)
    g = np.empty_like(y)
    for i in range(y.size):
        eps = base * (1.0 + abs(y[i]))
        e = np.zeros_like(y)
        e[i] = eps
        g[i] = (system.hamiltonian(y + e) - system.hamiltonian(y - e)) / (2 * eps)
    return g


# --- structure matrix -------------------------------------------------------

def test_apply_j_unit_vector():
    assert np.array_equal(apply_J([1.0, 0.0]), [0.0, -1.0])


def test_apply_j_squares_to_minus_identity():
    rng = np.random.default_rng(11)
    for _ in range(5):
        v = rng.standard_normal(8)
        assert np.array_equal(apply_J(apply_J(v)), -v)


def test_apply_j_skew_symmetry():
    rng = np.random.default_rng(12)
    for _ in range(5):
        v = rng.standard_normal(6)
        assert abs(v @ apply_J(v)) <= 1e-13 * (1 + v @ v)


def test_apply_j_rejects_odd_length():
    with pytest.raises(ValueError):
        apply_J([1.0, 2.0, 3.0])


# --- degree-6 oscillator ------------------------------------------------------

def test_fhp_energy_at_start():
    sys_ = problem_fhp()
    assert abs(sys_.hamiltonian(sys_.y0)) <= 1e-15  # 1/3 - 1/2 + 1/6


def test_fhp_gradient_at_start():
    sys_ = problem_fhp()
    assert np.array_equal(sys_.gradient(sys_.y0), [0.0, 0.5])


def test_fhp_gradient_vs_finite_differences():
    sys_ = problem_fhp()
    y = np.array([0.3, 0.7])
    g = sys_.gradient(y)
    fd = fd_gradient_scaled(sys_, y)
    assert np.max(np.abs(g - fd)) <= 1e-7 * (1 + np.max(np.abs(g)))


def test_fhp_metadata():
    sys_ = problem_fhp()
    assert sys_.m == 1 and sys_.poly_degree == 6


# --- Fermi-Pasta-Ulam ----------------------------------------------------------

def fpu_energy_oracle(y, omega=50.0):
    # independent term-by-term evaluation with explicit 1-based ghosts
    q = {i: y[i - 1] for i in range(1, 7)}
    q[0] = 0.0
    q[7] = 0.0
    p = {i: y[5 + i] for i in range(1, 7)}
    kinetic = 0.5 * sum(p[2 * i - 1] ** 2 + p[2 * i] ** 2 for i in range(1, 4))
    quadratic = omega**2 / 4 * sum((q[2 * i] - q[2 * i - 1]) ** 2 for i in range(1, 4))
    quartic = sum((q[2 * i + 1] - q[2 * i]) ** 4 for i in range(0, 4))
    return kinetic + quadratic + quartic


def test_fpu_energy_at_default_state():
    sys_ = problem_fpu()
    h0 = sys_.hamiltonian(sys_.y0)
    assert h0 == pytest.approx(fpu_energy_oracle(sys_.y0), abs=1e-12)
    assert h0 == pytest.approx(18.8127, abs=1e-12)  # exact rational 188127/10000


def test_fpu_energy_at_origin():
    sys_ = problem_fpu()
    assert sys_.hamiltonian(np.zeros(12)) == 0.0


def test_fpu_energy_random_states_match_oracle():
    sys_ = problem_fpu()
    rng = np.random.default_rng(21)
    for _ in range(10):
        y = rng.uniform(-1, 1, 12)
        assert sys_.hamiltonian(y) == pytest.approx(fpu_energy_oracle(y), rel=1e-13)


def test_fpu_gradient_vs_finite_differences():
    sys_ = problem_fpu()
    g = sys_.gradient(sys_.y0)
    fd = fd_gradient_scaled(sys_, sys_.y0)
    assert np.max(np.abs(g - fd)) <= 1e-6 * (1 + np.max(np.abs(g)))


def test_fpu_metadata():
    sys_ = problem_fpu()
    assert sys_.m == 6 and sys_.poly_degree == 4
    assert np.array_equal(sys_.y0[:6], np.arange(6) / 10.0)
    assert np.array_equal(sys_.y0[6:], np.zeros(6))


# --- Biot-Savart particle ---------------------------------------------------------

def biot_energy_oracle(y):
    # independent term-by-term evaluation, alpha = e B_0 = -1, mass 1
    x, yy, _, px, py, pz = y
    rho = math.sqrt(x * x + yy * yy)
    u = px + x / rho**2
    v = py + yy / rho**2
    w = pz - math.log(rho)
    return 0.5 * (u * u + v * v + w * w)


def test_biot_energy_at_default_state():
    sys_ = problem_biot()
    h0 = sys_.hamiltonian(sys_.y0)
    assert h0 == pytest.approx(biot_energy_oracle(sys_.y0), abs=1e-13)
    assert h0 == pytest.approx(2.6783880651251133, abs=1e-12)


def test_biot_gradient_vs_finite_differences():
    sys_ = problem_biot()
    g = sys_.gradient(sys_.y0)
    fd = fd_gradient_scaled(sys_, sys_.y0, base=1e-7)
    assert np.max(np.abs(g - fd)) <= 1e-6 * (1 + np.max(np.abs(g)))


def test_biot_singular_axis_raises():
    sys_ = problem_biot()
    bad = np.array([0.0, 0.0, 1.0, 0.1, 0.2, 0.3])
    with pytest.raises(ValueError):
        sys_.hamiltonian(bad)
    with pytest.raises(ValueError):
        sys_.gradient(bad)


def test_biot_metadata():
    sys_ = problem_biot()
    assert sys_.m == 3 and sys_.poly_degree is None
    assert np.array_equal(sys_.y0, [0.5, 10.0, 0.0, -0.1, -0.3, 0.0])


# --- harmonic oscillator -----------------------------------------------------------

def test_harmonic_energy_and_field():
    sys_ = problem_harmonic()
    assert sys_.hamiltonian(sys_.y0) == 0.5
    y = np.array([0.3, -0.8])
    assert np.array_equal(apply_J(sys_.gradient(y)), [-0.8, -0.3])  # (p, -q)
    assert sys_.poly_degree == 2


# --- finite-difference gradient ------------------------------------------------------

def test_fd_gradient_linear_hamiltonian_is_exact():
    lin = CanonicalSystem(
        "lin", 2, lambda y: float(np.sum(y)), lambda y: np.ones_like(y), np.zeros(4)
    )
    g = finite_difference_gradient(lin, np.zeros(4), 1e-6)
    assert np.array_equal(g, np.ones(4))


def test_fd_gradient_fhp_at_start():
    sys_ = problem_fhp()
    g = finite_difference_gradient(sys_, sys_.y0, 1e-6)
    assert np.max(np.abs(g - [0.0, 0.5])) <= 1e-8


def test_fd_gradient_exact_on_quadratics_for_any_step():
    sys_ = problem_harmonic()
    y = np.array([0.4, -1.2])
    for step in (1e-3, 1e-1, 0.5):
        g = finite_difference_gradient(sys_, y, step)
        assert np.max(np.abs(g - y)) <= 1e-12


def test_fd_gradient_rejects_bad_step():
    with pytest.raises(ValueError):
        finite_difference_gradient(problem_harmonic(), [1.0, 0.0], 0.0)


# --- cross-cutting properties -----------------------------------------------------------

@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_gradient_matches_finite_differences_at_random_states(name):
    sys_ = get_problem(name)
    rng = np.random.default_rng(hash(name) % 2**32)
    for _ in range(20):
        y = sys_.y0 + 0.1 * rng.standard_normal(2 * sys_.m)
        g = sys_.gradient(y)
        fd = fd_gradient_scaled(sys_, y)
        assert np.max(np.abs(g - fd)) <= 1e-6 * (1 + np.max(np.abs(g)))


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_field_is_orthogonal_to_gradient(name):
    sys_ = get_problem(name)
    rng = np.random.default_rng(99)
    for _ in range(10):
        y = sys_.y0 + 0.1 * rng.standard_normal(2 * sys_.m)
        g = sys_.gradient(y)
        assert abs(g @ apply_J(g)) <= 1e-12 * (1 + g @ g)


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_vectorized_evaluation_matches_rowwise(name):
    sys_ = get_problem(name)
    assert sys_.vectorized
    rng = np.random.default_rng(5)
    Y = sys_.y0 + 0.1 * rng.standard_normal((4, 2 * sys_.m))
    H_batch = sys_.hamiltonian(Y)
    G_batch = sys_.gradient(Y)
    for i in range(4):
        assert H_batch[i] == pytest.approx(sys_.hamiltonian(Y[i]), rel=1e-15, abs=1e-15)
        assert np.array_equal(G_batch[i], sys_.gradient(Y[i]))


def test_registry_contents():
    assert sorted(PROBLEMS) == ["biot", "fhp", "fpu", "harmonic"]
    degrees = {name: get_problem(name).poly_degree for name in PROBLEMS}
    assert degrees == {"fhp": 6, "fpu": 4, "harmonic": 2, "biot": None}


def test_registry_unknown_name():
    with pytest.raises(ValueError, match="unknown problem"):
        get_problem("kepler")
