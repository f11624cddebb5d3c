import numpy as np
import pytest

from scott._laguerre import sum_psi_squared
from scott.relativistic import (
    Coupling,
    DiracChannel,
    dirac_eigenvalue,
    dirac_radial_solve,
    rho_kappa_D,
)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def test_ground_state_closed_form():
    lam = dirac_eigenvalue(0, 1, 0.6)
    assert abs(lam - 0.8) < 1e-15
    for g in (0.1, 0.5, 0.95):
        assert abs(dirac_eigenvalue(0, 1, g) - np.sqrt(1.0 - g * g)) < 1e-15


@pytest.mark.parametrize("n,kappa", [(0, 1), (1, 1), (1, -1), (2, -2), (0, 3)])
def test_nonrelativistic_taylor_limit(n, kappa):
    g = 1e-3
    lam = dirac_eigenvalue(n, kappa, g)
    principal = n + abs(kappa)
    assert abs((lam - 1.0) + g * g / (2.0 * principal**2)) < 1e-9


def test_high_precision_oracle():
    import mpmath

    mpmath.mp.dps = 50
    g, n, kappa = mpmath.mpf("0.5"), 1, -1
    root = mpmath.sqrt(kappa * kappa - g * g)
    lam = (1 + (g / (n + root)) ** 2) ** mpmath.mpf("-0.5")
    assert abs(dirac_eigenvalue(1, -1, 0.5) - float(lam)) < 1e-15


def test_domain_validation():
    with pytest.raises(ValueError):
        dirac_eigenvalue(0, -1, 0.5)        # kappa < 0 needs n >= 1
    with pytest.raises(ValueError):
        dirac_eigenvalue(1, 0, 0.5)
    with pytest.raises(ValueError):
        dirac_eigenvalue(0, 1, 1.0)
    with pytest.raises(ValueError):
        Coupling(1.2, "dirac_furry")


def test_degeneracy_bookkeeping():
    # sum of 2|kappa| over the pairs at principal level n' equals 2 n'^2
    for principal in range(1, 12):
        total = 0
        for kappa in range(1, principal + 1):
            total += DiracChannel(kappa).degeneracy
        for kappa in range(-1, -principal, -1):
            total += DiracChannel(kappa).degeneracy
        assert total == 2 * principal**2


def test_channel_quantum_numbers():
    chan = DiracChannel(-2)
    assert chan.j == 1.5 and chan.ell == 2 and chan.degeneracy == 4
    chan = DiracChannel(1)
    assert chan.j == 0.5 and chan.ell == 0 and chan.n_start == 0
    assert DiracChannel(-1).n_start == 1


# ---------------------------------------------------------------------------
# Radial finite-difference solver
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("kappa,gamma", [(1, 0.6), (-1, 0.3)])
def test_radial_solver_matches_closed_form(kappa, gamma):
    table = dirac_radial_solve(kappa, gamma, n_states=4, n_nodes=20000)
    chan = DiracChannel(kappa)
    for i, entry in enumerate(table.channel(kappa)):
        want = dirac_eigenvalue(chan.n_start + i, kappa, gamma)
        assert abs(entry.eigenvalue - want) < 1e-6


def test_radial_solver_eigenfunction_indicial_behavior():
    kappa, gamma = 1, 0.9
    _, (r_n, f_plus, _, _) = dirac_radial_solve(
        kappa, gamma, n_states=1, n_nodes=20000, with_vectors=True)
    s_want = np.sqrt(kappa * kappa - gamma * gamma)
    sel = (r_n > 3e-8) & (r_n < 3e-5)
    slope = np.polyfit(np.log(r_n[sel]), np.log(np.abs(f_plus[sel, 0])), 1)[0]
    assert abs(slope - s_want) < 0.02 * s_want


def test_radial_solver_guards():
    with pytest.raises(ValueError):
        dirac_radial_solve(1, 1.2)
    with pytest.raises(ValueError):
        dirac_radial_solve(1, 0.5, n_states=30)


# ---------------------------------------------------------------------------
# Channel densities
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def dirac_channel_densities():
    gamma = 0.05
    radii = np.geomspace(0.5, 20.0, 12) / gamma
    out = {}
    for kappa in (1, -1):
        out[kappa] = rho_kappa_D(kappa, gamma, radii, n_max=8, n_nodes=16000)
    return gamma, radii, out


def test_channel_density_nonnegative(dirac_channel_densities):
    _, _, dens = dirac_channel_densities
    for vals in dens.values():
        assert np.all(vals >= 0.0)


def _schrodinger_channel_oracle(ell, gamma, radii, count, degeneracy):
    # charge-gamma channel density truncated at `count` states with the
    # same c/n'^3 completion used by the solver
    from scipy.special import zeta

    x = gamma * radii
    part, terms = sum_psi_squared(ell, count, x, tail_window=4)
    npr = np.arange(count - 4, count) + ell + 1.0
    coef = np.linalg.lstsq((npr**-3.0)[:, None], terms, rcond=None)[0][0]
    part = part + coef * zeta(3.0, float(count + ell + 1))
    return degeneracy * gamma * part / (4.0 * np.pi * radii**2)


def test_channel_density_nonrelativistic_limit(dirac_channel_densities):
    gamma, radii, dens = dirac_channel_densities
    # kappa = +1 is the s_(1/2) channel: both spin states of l = 0
    want_s = _schrodinger_channel_oracle(0, gamma, radii, count=8,
                                         degeneracy=2)
    assert np.max(np.abs(dens[1] / want_s - 1.0)) < 0.01
    # kappa = -1 is p_(1/2): one third of the q=2 l=1 channel
    want_p = _schrodinger_channel_oracle(1, gamma, radii, count=7,
                                         degeneracy=2)
    assert np.max(np.abs(dens[-1] / want_p - 1.0)) < 0.01


def test_total_density_envelope():
    # r^(3/2) rho bounded on [1, 1e3] at gamma = 0.5
    gamma = 0.5
    radii = np.geomspace(1.0, 1e3, 25)
    total = np.zeros_like(radii)
    for kappa in (1, -1, 2, -2, 3, -3):
        total += rho_kappa_D(kappa, gamma, radii, n_max=8, n_nodes=16000)
    env = radii**1.5 * total
    assert np.all(np.isfinite(env))
    assert env.max() < 50.0 * max(env.min(), 1e-12)
