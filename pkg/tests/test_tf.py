import numpy as np
import pytest

from scott.numerics import default_grid, log_grid
from scott.tf import (
    TFConfig,
    shooting_slope,
    sommerfeld_residual,
    tf_bohr_closed,
    tf_ionic_profile,
    tf_solve_atom,
    tf_universal,
)

Q1 = TFConfig(q=1)
Q2 = TFConfig(q=2)


# ---------------------------------------------------------------------------
# Universal profile
# ---------------------------------------------------------------------------

def test_config_gamma_value():
    # gamma_TF = (6 pi^2 / q)^(2/3) / 2, recomputed from q
    assert abs(Q2.gamma_tf - (3.0 * np.pi**2) ** (2.0 / 3.0) / 2.0) < 1e-14
    with pytest.raises(ValueError):
        TFConfig(q=1, gamma_tf=1.234)


def test_universal_residual_below_tol(universal):
    assert universal.residual < 1e-11


def test_universal_boundary_value(universal):
    # phi(0) = 1 approached along the small-x series
    assert abs(universal.phi_at(1e-12) - 1.0) < 1e-11
    series = 1.0 - universal.slope_b * 1e-8 + (4.0 / 3.0) * 1e-12
    assert abs(universal.phi_at(1e-8) - series) < 1e-13
    x = np.geomspace(1e-6, 50.0, 200)
    phi = universal.phi_at(x)
    assert np.all(phi > 0)
    assert np.all(np.diff(phi) < 0)


def test_universal_slope_matches_shooting_oracle(universal):
    b_oracle = shooting_slope()
    assert abs(universal.slope_b - b_oracle) < 2e-6
    assert abs(universal.slope_b - 1.588071) < 1e-5


def test_universal_ode_residual_by_finite_differences(universal):
    # independent substitution check on a dense mesh, away from both ends
    x = np.geomspace(1e-3, 3e4, 4000)
    phi = universal.phi_at(x)
    t = np.log(x)
    h = t[1] - t[0]
    phi_t = np.gradient(phi, h)
    phi_tt = np.gradient(phi_t, h)
    resid = (phi_tt - phi_t) / x**2 - phi**1.5 / np.sqrt(x)
    scale = phi**1.5 / np.sqrt(x)
    idx = slice(50, -50)
    assert np.max(np.abs(resid[idx] / scale[idx])) < 5e-4


def test_universal_far_field_structure(universal):
    # x^3 phi -> 144 with a correction decaying like x^(-0.772)
    from scott.tf import _D_SECOND
    x = np.geomspace(1e3, 8e3, 40)
    defect = 1.0 - universal.phi_at(x) * x**3 / 144.0
    corrected = defect / (1.0 - _D_SECOND * defect)
    slope, _ = np.polyfit(np.log(x), np.log(corrected), 1)
    assert abs(slope - (7.0 - np.sqrt(73.0)) / 2.0) < 0.01
    # frozen magnitude: x^3 phi at 1e3 sits ~6% below the pure power law
    assert abs(universal.phi_at(1e3) * 1e9 - 135.13) < 0.15


# ---------------------------------------------------------------------------
# Atomic solutions
# ---------------------------------------------------------------------------

def test_hydrogen_energy_q1(tf_hydrogen_q1):
    want = -3.67874 / Q1.gamma_tf
    assert abs(tf_hydrogen_q1.e_total / want - 1.0) < 1e-3


def test_hydrogen_energy_q2(tf_hydrogen_q2):
    want = -0.48429 * 2.0 ** (2.0 / 3.0)
    assert abs(tf_hydrogen_q2.e_total / want - 1.0) < 2e-3


def test_energy_bookkeeping(tf_hydrogen_q1):
    s = tf_hydrogen_q1
    assert abs(s.e_total - (s.kinetic - s.attraction + s.repulsion)) \
        <= 1e-10 * abs(s.e_total)


@pytest.mark.parametrize("n,z", [(1.0, 1.0), (0.5, 1.0), (10.0, 10.0)])
def test_virial_identity(n, z):
    s = tf_solve_atom(n, z, Q1)
    assert s.virial_residual < 1e-7


def test_scaling_covariance():
    a = 8.0
    s1 = tf_solve_atom(1.0, 1.0, Q1)
    s2 = tf_solve_atom(a, a, Q1)
    assert abs(s2.e_total / (a ** (7.0 / 3.0) * s1.e_total) - 1.0) < 1e-6
    # rho_{aN,aZ}(r) = a^2 rho_{N,Z}(a^(1/3) r)
    r = np.geomspace(1e-4, 5.0, 40)
    x1 = a ** (1.0 / 3.0) * r / s1.length_scale
    x2 = r / s2.length_scale
    rho1 = Q1.gamma_tf**-1.5 * (s1.profile.phi_at(x1)
                                / (a ** (1.0 / 3.0) * r)) ** 1.5
    rho2 = Q1.gamma_tf**-1.5 * (a * s2.profile.phi_at(x2) / r) ** 1.5
    assert np.max(np.abs(rho2 / (a * a * rho1) - 1.0)) < 1e-6


def test_ion_chemical_potential_and_support():
    s = tf_solve_atom(0.5, 1.0, Q1)
    assert s.mu > 0
    edge = s.length_scale * s.profile.x_edge
    r = s.density.grid.nodes
    assert np.all(s.density.values[r > edge * 1.0000001] == 0.0)
    assert abs(s.density.particle_number - 0.5) < 1e-6
    # mu agrees with the exterior Coulomb value (Z - N) / r_edge
    assert abs(s.mu - 0.5 / edge) < 1e-10 * s.mu


def test_neutral_has_zero_mu(tf_hydrogen_q1):
    assert tf_hydrogen_q1.mu == 0.0


def test_overfilled_returns_neutral():
    s = tf_solve_atom(1.4, 1.0, Q1)
    assert s.overfilled
    assert abs(s.e_total - tf_solve_atom(1.0, 1.0, Q1).e_total) < 1e-12


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        tf_solve_atom(-1.0, 1.0, Q1)
    with pytest.raises(ValueError):
        tf_solve_atom(1.0, 0.0, Q1)
    with pytest.raises(ValueError):
        tf_ionic_profile(1.5)


def test_euler_lagrange_against_grid_hartree(tf_hydrogen_q1):
    # gamma rho^(2/3) = (Z/r - V_H - mu)_+ with V_H from grid quadrature
    s = tf_hydrogen_q1
    g = s.density.grid
    r, w = g.nodes, g.weights
    shell = w * 4.0 * np.pi * r * r * s.density.values
    inner = np.cumsum(shell)
    outer = np.cumsum((shell / r)[::-1])[::-1]
    v_h = inner / r + np.concatenate([outer[1:], [0.0]])
    lhs = Q1.gamma_tf * s.density.values ** (2.0 / 3.0)
    rhs = np.clip(1.0 / r - v_h - s.mu, 0.0, None)
    sel = (r > 1e-4) & (r < 20.0)
    assert np.max(np.abs(lhs[sel] - rhs[sel]) / lhs[sel]) < 1e-3


def test_mu_monotone_convex_in_n():
    ns = np.linspace(0.3, 0.95, 8)
    mus = np.array([tf_solve_atom(n, 1.0, Q1).mu for n in ns])
    assert np.all(np.diff(mus) < 0)
    assert np.all(np.diff(mus, 2) > 0)


def test_energy_strictly_decreasing_in_n():
    ns = np.linspace(0.3, 1.0, 6)
    es = np.array([tf_solve_atom(n, 1.0, Q1).e_total for n in ns])
    assert np.all(np.diff(es) < 0)


def test_density_cusp(tf_hydrogen_q1):
    s = tf_hydrogen_q1
    r = 1e-5
    x = r / s.length_scale
    rho = Q1.gamma_tf**-1.5 * (s.profile.phi_at(x) / r) ** 1.5
    want = (1.0 / Q1.gamma_tf) ** 1.5 * r ** -1.5
    assert abs(rho / want - 1.0) < 0.01


def test_density_sommerfeld_tail(tf_hydrogen_q1):
    s = tf_hydrogen_q1
    x = 5e4
    r = x * s.length_scale
    rho = Q1.gamma_tf**-1.5 * (s.profile.phi_at(x) / r) ** 1.5
    want = (3.0 * Q1.gamma_tf / np.pi) ** 3 / r**6
    assert abs(rho / want - 1.0) < 0.01


# ---------------------------------------------------------------------------
# Repulsion-free (Bohr) closed forms
# ---------------------------------------------------------------------------

def test_bohr_neutral_coefficient_identity():
    # E(Z, Z) = -(3^(1/3)/2) q^(2/3) Z^(7/3) algebraically
    for q in (1, 2, 3):
        cfg = TFConfig(q=q)
        z = 7.0
        got = tf_bohr_closed(z, z, cfg)["energy"]
        want = -(3.0 ** (1.0 / 3.0) / 2.0) * q ** (2.0 / 3.0) * z ** (7.0 / 3.0)
        assert abs(got / want - 1.0) < 1e-14


def test_bohr_hydrogen_direct_substitution():
    got = tf_bohr_closed(1.0, 1.0, Q1)
    assert abs(got["energy"] + 3.0 * (np.pi**2 / 4.0) ** (2.0 / 3.0)
               / Q1.gamma_tf) < 1e-14
    assert abs(got["mu"] - (np.pi**2 / 4.0) ** (2.0 / 3.0) / Q1.gamma_tf) < 1e-14


def _bohr_grid_minimum(n, z, cfg):
    # independent oracle: constrained minimization of the repulsion-free
    # functional via bisection on mu and direct quadrature
    grid = log_grid(n=6000, r_min=1e-8, r_max=1e5)
    r, w = grid.nodes, grid.weights
    gamma = cfg.gamma_tf

    def number(mu):
        rho = gamma**-1.5 * np.clip(z / r - mu, 0.0, None) ** 1.5
        return grid.integrate(4.0 * np.pi * r * r * rho)

    lo, hi = 1e-8, 1e6
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        if number(mid) > n:
            lo = mid
        else:
            hi = mid
    mu = np.sqrt(lo * hi)
    rho = gamma**-1.5 * np.clip(z / r - mu, 0.0, None) ** 1.5
    shell = 4.0 * np.pi * r * r
    kinetic = grid.integrate(shell * 0.6 * gamma * rho ** (5.0 / 3.0))
    attraction = grid.integrate(shell * z / r * rho)
    return kinetic - attraction


@pytest.mark.parametrize("n,z", [(1.0, 1.0), (8.0, 8.0), (3.0, 10.0)])
def test_bohr_closed_matches_grid_minimization(n, z):
    want = tf_bohr_closed(n, z, Q1)["energy"]
    got = _bohr_grid_minimum(n, z, Q1)
    assert abs(got / want - 1.0) < 1e-4


# ---------------------------------------------------------------------------
# Sommerfeld far-field solution
# ---------------------------------------------------------------------------

def test_sommerfeld_exact_cancellation(grid):
    assert sommerfeld_residual(grid, Q1) < 1e-9
    assert sommerfeld_residual(grid, Q2) < 1e-9


def test_sommerfeld_detects_non_solution(grid):
    res = sommerfeld_residual(grid, Q1, scale=1.01)
    assert 0.003 < res < 0.02


def test_sommerfeld_refinement_invariant():
    r1 = sommerfeld_residual(log_grid(n=2000), Q1)
    r2 = sommerfeld_residual(log_grid(n=4000), Q1)
    assert r1 < 1e-9 and r2 < 1e-9
