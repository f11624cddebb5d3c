import numpy as np
import pytest
from scipy.special import zeta

from scott.numerics import log_grid
from scott.tf import TFConfig, tf_solve_atom
from scott.tfw import (
    dtfw_coefficient,
    renormalized_energy,
    tfw_canonical_profile,
    tfw_repulsion_free_profile,
    tfw_solve_atom,
    tune_A,
)

Q2 = TFConfig(q=2)
Q1 = TFConfig(q=1)


@pytest.fixture(scope="module")
def profile():
    return tfw_canonical_profile()


# ---------------------------------------------------------------------------
# Canonical repulsion-free profile
# ---------------------------------------------------------------------------

def test_profile_residual_and_origin(profile):
    assert profile.residual < 1e-10
    assert 0.0 < profile.u0 < 2.0
    assert np.isfinite(profile.u0)


def test_profile_equation_by_finite_differences(profile):
    # -w'' + ((4 pi)^(-2/3) (w^2/r^2)^(2/3) - 1/r) w = 0 on a uniform mesh
    h = 0.002
    r = np.arange(0.5, 40.0, h)
    w = profile.w_at(r)
    d2 = (-w[4:] + 16 * w[3:-1] - 30 * w[2:-2] + 16 * w[1:-3] - w[:-4]) \
        / (12 * h * h)
    rc, wc = r[2:-2], w[2:-2]
    pot = (4.0 * np.pi) ** (-2.0 / 3.0) * (wc * wc / rc**2) ** (2.0 / 3.0) \
        - 1.0 / rc
    resid = -d2 + pot * wc
    assert np.max(np.abs(resid)) < 1e-7


def test_profile_far_field(profile):
    r = np.geomspace(100.0, 5000.0, 30)
    val = r**0.75 * profile.u_at(r)
    assert np.all(np.abs(val - 1.0) < 0.01)


def test_profile_gradient_integral_stable():
    base = tfw_canonical_profile()
    doubled = tfw_canonical_profile(r_right=600.0)
    rel = abs(doubled.gradient_integral / base.gradient_integral - 1.0)
    assert rel < 1e-3


def test_profile_universal_in_q():
    p1 = tfw_canonical_profile(q=1)
    p2 = tfw_canonical_profile(q=2)
    assert abs(p1.gradient_integral - p2.gradient_integral) < 1e-8
    assert abs(p1.u0 - p2.u0) < 1e-9


def test_renormalized_energy_identity(profile):
    # gradient part equals the local part at the minimizer, and the total
    # reproduces the Z^2 coefficient of the repulsion-free hierarchy
    ren = renormalized_energy(profile, Q2)
    assert abs(ren["local"] / ren["weizsacker"] - 1.0) < 1e-6
    d = dtfw_coefficient(2.0 * Q2.gamma_tf, profile, Q2)
    assert abs(ren["z_squared_coefficient"] / d - 1.0) < 1e-6


def test_scaling_covariance_of_repulsion_free_problem():
    # direct solve at twice the canonical charge vs the scaling map
    gamma = Q2.gamma_tf
    z, a_w = 2.0 * gamma, 2.0 * gamma
    direct = tfw_repulsion_free_profile(z, a_w, Q2)
    canonical = tfw_canonical_profile()
    s = 2.0 * z / a_w
    r = np.geomspace(1e-3, 50.0, 60)
    scaled = (2.0 * z * z / (a_w * gamma)) ** 1.5 * canonical.rho_at(s * r)
    assert np.max(np.abs(direct.rho_at(r) / scaled - 1.0)) < 0.01


# ---------------------------------------------------------------------------
# Scott-type coefficient and A tuning
# ---------------------------------------------------------------------------

def test_dtfw_scaling_limits(profile):
    assert dtfw_coefficient(0.0, profile, Q2) == 0.0
    d1 = dtfw_coefficient(0.1, profile, Q2)
    d4 = dtfw_coefficient(0.4, profile, Q2)
    assert abs(d4 / d1 - 2.0) < 1e-12


def test_dtfw_half_at_tuned_a(profile):
    d = dtfw_coefficient(0.1859, profile, Q2)
    assert abs(d - 0.5) < 0.01


def test_tune_a_energy_mode():
    a = tune_A("energy", Q2)
    assert abs(a - 0.1859) < 0.02 * 0.1859


def test_tune_a_density_mode():
    rho_h0 = 2.0 * zeta(3.0, 1.0) / np.pi
    a = tune_A("density", Q2, rho_h0=rho_h0)
    assert abs(a - 0.4798) < 0.02 * 0.4798


def test_tune_a_q_ratio_identity():
    # A(q=1)/A(q=2) = (1/2)^2 (gamma(1)/gamma(2))^3 exactly (and equals 1)
    a1 = tune_A("energy", Q1)
    a2 = tune_A("energy", Q2)
    want = 0.25 * (Q1.gamma_tf / Q2.gamma_tf) ** 3
    assert abs(a1 / a2 - want) < 1e-10
    assert abs(want - 1.0) < 1e-14


def test_tune_a_rejects_bad_input():
    with pytest.raises(ValueError):
        tune_A("density", Q2)
    with pytest.raises(ValueError):
        tune_A("frequency", Q2)


# ---------------------------------------------------------------------------
# Full atomic minimizer
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("z", [1.0, 10.0, 100.0])
def test_tfw_energy_above_tf(z):
    a = tune_A("energy", Q2)
    sol = tfw_solve_atom(z, z, a, Q2)
    tf_e = tf_solve_atom(z, z, Q2).e_total
    assert sol.e_total >= tf_e
    assert sol.mu > 0.0
    assert abs(sol.density.particle_number - z) < 1e-8 * z


def test_tfw_scott_term_approaches_dtfw():
    # (E_TFW - E_TF)/Z^2 -> D^TFW along Z = 1e3..1e5 (fit in Z^(-1/3))
    a = tune_A("energy", Q2)
    profile = tfw_canonical_profile()
    d_want = dtfw_coefficient(a, profile, Q2)
    grid = log_grid(n=3200, r_min=1e-9, r_max=1e4)
    zs = np.array([1e3, 1e4, 1e5])
    defect = []
    for z in zs:
        sol = tfw_solve_atom(z, z, a, Q2, grid=grid)
        tf_e = tf_solve_atom(z, z, Q2, grid=grid).e_total
        defect.append((sol.e_total - tf_e) / z**2)
    defect = np.array(defect)
    assert np.all(np.diff(defect) > 0.0)
    coef = np.polyfit(zs ** (-1.0 / 3.0), defect, 1)
    extrapolated = coef[1]
    assert abs(extrapolated / d_want - 1.0) < 0.10
    assert abs(defect[-1] / d_want - 1.0) < 0.10


def test_tfw_density_finite_origin_fast_decay():
    a = tune_A("energy", Q2)
    sol = tfw_solve_atom(1.0, 1.0, a, Q2)
    r = sol.density.grid.nodes
    rho = sol.density.values
    sel = (r > 1e-4) & (r < 1e-3)      # clear of the pinned-node layer
    assert np.isfinite(rho[sel]).all()
    assert rho[sel].max() < 1.2 * rho[sel].min()
    # decay faster than any power: log-log slope steepens without bound
    win = (r > 10.0) & (r < 80.0)
    slope = np.gradient(np.log(rho[win]), np.log(r[win]))
    assert slope[-1] < -9.0
    assert slope[-1] < slope[0] - 5.0
    assert np.all(np.diff(rho[win]) < 0.0)


def test_tfw_range_guard():
    with pytest.raises(ValueError):
        tfw_solve_atom(2.0, 1.0, 0.18, Q2)
    with pytest.raises(ValueError):
        tfw_solve_atom(-1.0, 1.0, 0.18, Q2)


def test_tfw_ion_converges():
    a = tune_A("energy", Q2)
    sol = tfw_solve_atom(0.8, 1.0, a, Q2)
    ne = tfw_solve_atom(1.0, 1.0, a, Q2)
    assert sol.e_total > ne.e_total        # E decreases with N below N_c
    assert sol.mu > ne.mu
