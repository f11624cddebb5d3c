"""Thomas-Fermi-Weizsacker theory.

Two solvers live here: the repulsion-free profile (a two-point problem for
w = sqrt(4 pi) r sqrt(rho) between a linear origin series and an algebraic
r^(1/4) far field), which fixes the gradient-correction energy coefficient,
and the full atomic minimizer with Hartree repulsion, a preconditioned
projected gradient flow on w with backtracking line search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_bvp
from scipy.linalg import solveh_banded

from .numerics import RadialDensity, RadialGrid, default_grid, gauss_panels
from .tf import TFConfig

__all__ = [
    "TFWProfile",
    "TFWSolution",
    "tfw_canonical_profile",
    "tfw_repulsion_free_profile",
    "renormalized_energy",
    "dtfw_coefficient",
    "tune_A",
    "tfw_solve_atom",
]

_SQRT4PI = np.sqrt(4.0 * np.pi)
_C23 = (4.0 * np.pi) ** (-2.0 / 3.0)
# second far-field correction of the canonical profile, w ~ r^(1/4) (1 + v1/r + v2/r^2)
_V2_CANONICAL = -1323.0 / 8192.0


@dataclass(frozen=True)
class TFWProfile:
    """Repulsion-free profile: u = sqrt(rho) samples plus dense evaluation."""

    z: float
    a_weizsacker: float
    gamma: float
    grid: RadialGrid
    u: np.ndarray
    u0: float
    gradient_integral: float
    r_match: float
    slope_origin: float
    v1: float
    v2: float
    residual: float
    _dense: object = field(default=None, repr=False, compare=False)

    def w_at(self, r):
        """w = sqrt(4 pi) r u, evaluated anywhere."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        lo = r < self._dense.x[0] if hasattr(self._dense, "x") else r < 0
        mid = (~lo) & (r <= self.r_match)
        hi = r > self.r_match
        if np.any(lo):
            rs = r[lo]
            a = self.slope_origin
            b = -self.z * a / self.a_weizsacker
            out[lo] = a * rs + b * rs * rs
        if np.any(mid):
            out[mid] = self._dense(r[mid])[0]
        if np.any(hi):
            rs = r[hi]
            w0 = _SQRT4PI * (self.z / self.gamma) ** 0.75
            out[hi] = w0 * rs**0.25 * (1.0 + self.v1 / rs + self.v2 / rs**2)
        return float(out[0]) if scalar else out

    def u_at(self, r):
        r = np.asarray(r, dtype=float)
        return self.w_at(r) / (_SQRT4PI * np.maximum(r, 1e-300))

    def rho_at(self, r):
        return self.u_at(r) ** 2


def _rf_solve(z: float, a_w: float, gamma: float, r_right: float | None,
              tol: float):
    """Solve the repulsion-free radial equation in physical variables."""
    s_r = a_w / (2.0 * z)
    r_left = 1e-4 * s_r
    if r_right is None:
        r_right = 300.0 * s_r
    w0_amp = _SQRT4PI * (z / gamma) ** 0.75
    v1 = -9.0 * a_w / (128.0 * z)
    v2 = _V2_CANONICAL * s_r * s_r

    def coeffs(a):
        b = -z * a / a_w
        c = (gamma * _C23 * np.abs(a) ** (4.0 / 3.0) * a
             + z * z * a / a_w) / (3.0 * a_w)
        return b, c

    # solve in t = log r; y = [w, dw/dt]
    def rhs(t, y):
        r = np.exp(t)
        w = np.clip(y[0], 0.0, None)
        pot = gamma * _C23 * (w * w / (r * r)) ** (2.0 / 3.0) - z / r
        return np.vstack([y[1], y[1] + (2.0 / a_w) * r * r * pot * y[0]])

    def bc(ya, yb):
        a = ya[0] / r_left
        for _ in range(3):
            b, c = coeffs(a)
            a = (ya[0] - b * r_left**2 - c * r_left**3) / r_left
        b, c = coeffs(a)
        # y1 = r w'(r)
        left = ya[1] - r_left * (a + 2.0 * b * r_left + 3.0 * c * r_left**2)
        right = yb[0] - w0_amp * r_right**0.25 \
            * (1.0 + v1 / r_right + v2 / r_right**2)
        return np.array([left, right])

    t = np.linspace(np.log(r_left), np.log(r_right), 2500)
    r = np.exp(t)
    a_guess = 0.9703 * _SQRT4PI * (2.0 * z * z / (a_w * gamma)) ** 0.75
    guess = a_guess * r / (1.0 + (a_guess / w0_amp) * r**0.75)
    y0 = np.vstack([guess, np.gradient(guess, t)])
    sol = solve_bvp(rhs, bc, t, y0, tol=tol, max_nodes=200000)
    if sol.status != 0:
        raise RuntimeError(f"repulsion-free TFW solve failed: {sol.message}")

    class _DenseInR:
        """Evaluate (w, w') at radii from the log-variable solution."""

        def __init__(self, inner):
            self.inner = inner
            self.x = np.exp(inner.x)

        def __call__(self, r):
            r = np.asarray(r, dtype=float)
            y = self.inner(np.log(r))
            return np.vstack([y[0], y[1] / r])

    dense = _DenseInR(sol.sol)
    w_left = sol.y[0, 0]
    a = w_left / r_left
    for _ in range(3):
        b, c = coeffs(a)
        a = (w_left - b * r_left**2 - c * r_left**3) / r_left
    return sol, dense, float(a), v1, v2, r_left, r_right


def _gradient_integral(dense, a, v1, v2, r_left, r_right, w0_amp):
    """I = int_0^inf w'(r)^2 dr with the analytic algebraic tail."""
    nodes, weights = gauss_panels(
        np.concatenate([[r_left], np.geomspace(4.0 * r_left, r_right, 300)]),
        order=12)
    wp = dense(nodes)[1]
    core = float(np.dot(weights, wp * wp)) + a * a * r_left
    # tail of (w')^2 = (w0^2/16) r^(-3/2) [1 - 6 v1/r + (9 v1^2 - 14 v2)/r^2]
    pref = w0_amp * w0_amp / 16.0
    tail = pref * (2.0 * r_right**-0.5 - 6.0 * v1 * (2.0 / 3.0) * r_right**-1.5
                   + (9.0 * v1 * v1 - 14.0 * v2) * 0.4 * r_right**-2.5)
    return core + tail


def tfw_repulsion_free_profile(z: float, a_weizsacker: float, cfg: TFConfig,
                               r_right: float | None = None,
                               tol: float = 1e-10,
                               grid: RadialGrid | None = None) -> TFWProfile:
    """Minimizing profile of the renormalized atomic functional without
    electron repulsion, at nuclear charge `z` and gradient coefficient
    `a_weizsacker`."""
    if z <= 0.0 or a_weizsacker <= 0.0 or tol <= 0.0:
        raise ValueError("z, A and tol must be positive")
    gamma = cfg.gamma_tf
    sol, dense, a, v1, v2, r_left, r_r = _rf_solve(z, a_weizsacker, gamma,
                                                   r_right, tol)
    w0_amp = _SQRT4PI * (z / gamma) ** 0.75
    grad = _gradient_integral(dense, a, v1, v2, r_left, r_r, w0_amp)
    if grid is None:
        grid = default_grid()
    prof = TFWProfile(z=z, a_weizsacker=a_weizsacker, gamma=gamma, grid=grid,
                      u=np.empty(0), u0=a / _SQRT4PI,
                      gradient_integral=grad, r_match=r_r, slope_origin=a,
                      v1=v1, v2=v2,
                      residual=float(sol.rms_residuals.max()), _dense=dense)
    u = prof.u_at(grid.nodes)
    object.__setattr__(prof, "u", u)
    return prof


@lru_cache(maxsize=4)
def tfw_canonical_profile(tol: float = 1e-10, q: int = 2,
                          r_right: float = 300.0) -> TFWProfile:
    """Canonical normalization Z = A/2 = gamma_TF; reused for every A by
    the explicit scaling, so the equation reads (-d^2 + ..., -1/r) w = 0."""
    cfg = TFConfig(q=q)
    gamma = cfg.gamma_tf
    return tfw_repulsion_free_profile(gamma, 2.0 * gamma, cfg,
                                      r_right=r_right, tol=tol)


def renormalized_energy(profile: TFWProfile, cfg: TFConfig) -> dict:
    """Parts of the renormalized repulsion-free energy of a profile.

    The local terms carry the subtraction (2/5) gamma (Z/(gamma r))^(5/2)
    inside the same quadrature; for the minimizer the local part equals the
    gradient part and the total is the Z^2 coefficient of the hierarchy.
    """
    gamma = cfg.gamma_tf
    z, a_w = profile.z, profile.a_weizsacker
    r_l = 1e-4 * a_w / (2.0 * z)
    r_r = profile.r_match

    def local_density(r):
        rho = profile.rho_at(r)
        return 4.0 * np.pi * r * r * (
            0.6 * gamma * rho ** (5.0 / 3.0) - z / r * rho
            + 0.4 * gamma * (z / (gamma * r)) ** 2.5)

    u_edges = np.concatenate([[0.0], np.geomspace(np.sqrt(r_l) * 0.5,
                                                  np.sqrt(r_r), 250)])
    u, wq = gauss_panels(u_edges, order=12)
    core = 2.0 * float(np.dot(wq * u, local_density(u * u)))
    # algebraic tail: integrand -> (16 pi /3) gamma (z/gamma)^(5/2) v1^2 r^(-5/2)
    pref = (16.0 * np.pi / 3.0) * gamma * (z / gamma) ** 2.5
    tail = pref * profile.v1**2 * (2.0 / 3.0) * r_r**-1.5
    local = core + tail
    weiz = 0.5 * a_w * profile.gradient_integral
    return {
        "weizsacker": weiz,
        "local": local,
        "total": weiz + local,
        "z_squared_coefficient": (weiz + local) / (z * z),
    }


def dtfw_coefficient(a_weizsacker: float, profile: TFWProfile,
                     cfg: TFConfig) -> float:
    """Scott-type coefficient 2^(1/2) A^(1/2) gamma^(-3/2) I."""
    if a_weizsacker < 0.0:
        raise ValueError("A must be nonnegative")
    return (np.sqrt(2.0 * a_weizsacker) * cfg.gamma_tf ** -1.5
            * profile.gradient_integral)


def tune_A(mode: str, cfg: TFConfig, rho_h0: float | None = None,
           profile: TFWProfile | None = None) -> float:
    """Choose the gradient coefficient A.

    mode="energy": match the Z^2 energy coefficient to q/4, i.e.
    A = (q gamma^(3/2) / (4 sqrt(2) I))^2.
    mode="density": match the density at the nucleus to the hydrogenic
    value rho_h0, i.e. A = (2/gamma) (rho_inf(0)/rho_h0)^(2/3).
    """
    if profile is None:
        profile = tfw_canonical_profile()
    gamma = cfg.gamma_tf
    if mode == "energy":
        return (cfg.q * gamma**1.5
                / (4.0 * np.sqrt(2.0) * profile.gradient_integral)) ** 2
    if mode == "density":
        if rho_h0 is None or rho_h0 <= 0.0:
            raise ValueError("density mode needs the hydrogenic density at 0")
        return (2.0 / gamma) * (profile.u0**2 / rho_h0) ** (2.0 / 3.0)
    raise ValueError(f"unknown tuning mode {mode!r}")


# ---------------------------------------------------------------------------
# Full atomic TFW minimizer
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TFWSolution:
    """Minimizer of the full TFW functional with energies and diagnostics."""

    z: float
    n_electrons: float
    a_weizsacker: float
    config: TFConfig
    density: RadialDensity
    mu: float
    weizsacker: float
    kinetic: float
    attraction: float
    repulsion: float
    e_total: float
    el_residual: float
    iterations: int


class TFWConvergenceError(RuntimeError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


def _hartree(shell, r):
    inner = np.cumsum(shell)
    outer = np.cumsum((shell / r)[::-1])[::-1]
    return inner / r + np.concatenate([outer[1:], [0.0]])


def tfw_solve_atom(n_electrons: float, z: float, a_weizsacker: float,
                   cfg: TFConfig, grid: RadialGrid | None = None,
                   max_iter: int = 3000, energy_tol: float = 1e-11,
                   residual_tol: float = 1e-5) -> TFWSolution:
    """Constrained TFW minimizer via preconditioned projected gradient flow.

    Works on w = sqrt(4 pi) r sqrt(rho), pinned to zero at both grid ends
    (a free inner boundary admits a spurious wall state in the Coulomb
    well).  The flow starts from the known asymptotic structure -- the
    scaled repulsion-free core capped by the screened TF density -- and
    descends along directions preconditioned by the shifted linearized
    operator, with an Armijo backtracking line search and the chemical
    potential refreshed from the Rayleigh quotient.  The Euler-Lagrange
    residual is measured away from the pinned nodes, where the Dirichlet
    kink would otherwise dominate.
    """
    if n_electrons <= 0.0 or z <= 0.0:
        raise ValueError("N and Z must be positive")
    if n_electrons > 1.5 * z:
        raise ValueError("solver guard: N <= 1.5 Z (existence holds below 2Z)")
    if grid is None:
        grid = default_grid()
    gamma = cfg.gamma_tf
    a_w = a_weizsacker
    r, wq = grid.nodes, grid.weights
    n = r.size
    h = np.diff(r)
    main = np.zeros(n)
    main[:-1] += 1.0 / h
    main[1:] += 1.0 / h
    off = -1.0 / h

    def kin_apply(w):
        out = main * w
        out[:-1] += off * w[1:]
        out[1:] += off * w[:-1]
        return out

    def energy_parts(w):
        d = np.diff(w)
        weiz = 0.5 * a_w * float(np.sum(d * d / h))
        rho23 = (w * w / (4.0 * np.pi * r * r)) ** (2.0 / 3.0)
        kin = 0.6 * gamma * float(np.dot(wq, rho23 * w * w))
        att = z * float(np.dot(wq, w * w / r))
        shell = wq * w * w
        v_h = _hartree(shell, r)
        rep = 0.5 * float(np.dot(shell, v_h))
        return weiz, kin, att, rep, v_h, rho23

    from .tf import tf_solve_atom

    n_eff = min(n_electrons, z)
    tf_sol = tf_solve_atom(n_eff, z, cfg, grid=grid)
    profile = tfw_canonical_profile(q=cfg.q)
    rho_core = (2.0 * z * z / (a_w * gamma)) ** 1.5 \
        * profile.rho_at(2.0 * z * r / a_w)
    rho0 = np.minimum(rho_core, np.clip(tf_sol.density.values, 1e-280, None))
    w = np.sqrt(4.0 * np.pi * rho0) * r
    w[0] = w[-1] = 0.0
    w *= np.sqrt(n_electrons / float(np.dot(wq, w * w)))

    parts = energy_parts(w)
    energy = parts[0] + parts[1] - parts[2] + parts[3]
    step = 1.0
    mu = 0.0
    residual = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        weiz, kin, att, rep, v_h, rho23 = parts
        w_eff = gamma * rho23 - z / r + v_h
        h_w = 0.5 * a_w * kin_apply(w) + wq * w_eff * w
        mu = -float(np.dot(w, h_w)) / n_electrons
        g = 2.0 * (h_w + mu * wq * w)
        g[0] = g[-1] = 0.0
        scale = np.sqrt(float(np.sum(h_w * h_w / wq))) \
            + abs(mu) * np.sqrt(n_electrons)
        resv = g * g / wq
        residual = np.sqrt(float(np.sum(resv[2:-2]))) / scale
        sigma = 1.3 * abs(mu) + 1e-4 * z ** (4.0 / 3.0) + 1e-6
        direction = None
        for _ in range(24):
            ab = np.zeros((2, n))
            ab[0, 1:] = 0.5 * a_w * off
            ab[1] = 0.5 * a_w * main + wq * (w_eff + sigma)
            ab[1][0] = ab[1][-1] = 1.0
            ab[0][1] = ab[0][-1] = 0.0
            try:
                direction = solveh_banded(ab, g)
                break
            except np.linalg.LinAlgError:
                sigma *= 3.0
        if direction is None:
            raise TFWConvergenceError("preconditioner shift search failed",
                                      residual)
        accepted = False
        for _ in range(60):
            trial = w - step * direction
            trial[0] = trial[-1] = 0.0
            trial *= np.sqrt(n_electrons / float(np.dot(wq, trial * trial)))
            p_t = energy_parts(trial)
            e_t = p_t[0] + p_t[1] - p_t[2] + p_t[3]
            if e_t < energy:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # stationary along the preconditioned direction to rounding
            converged = residual < 100.0 * residual_tol
            break
        de = abs(e_t - energy) / max(abs(e_t), 1e-30)
        w, energy, parts = trial, e_t, p_t
        step = min(step * 1.9, 8.0)
        if de < energy_tol and residual < residual_tol:
            converged = True
            break
    if not converged and residual > 100.0 * residual_tol:
        raise TFWConvergenceError(
            f"no convergence after {iterations} iterations "
            f"(residual {residual:.2e})", residual)

    weiz, kin, att, rep, _, _ = parts
    rho = w * w / (4.0 * np.pi * r * r)
    density = RadialDensity(grid=grid, values=rho, dimension="3d")
    return TFWSolution(z=z, n_electrons=n_electrons, a_weizsacker=a_w,
                       config=cfg, density=density, mu=mu, weizsacker=weiz,
                       kinetic=kin, attraction=att, repulsion=rep,
                       e_total=weiz + kin - att + rep, el_residual=residual,
                       iterations=iterations)
