"""Hellmann and Hellmann-Weizsacker angular-momentum channel functionals.

The Hellmann channel minimizer is pointwise algebraic on the classically
allowed interval; channel sums against a shared chemical potential land on
the repulsion-free TF energy.  The Weizsacker-corrected channels are
minimized by a damped Newton iteration on v = sqrt(varrho) and reproduce
the same hierarchy with a Z^2-size gradient correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .numerics import RadialGrid, default_grid, gauss_panels
from .tf import TFConfig, tf_bohr_closed

__all__ = [
    "ChannelDensity",
    "HWChannelResult",
    "HWSolution",
    "alpha_channel",
    "hellmann_support",
    "hellmann_channel_min",
    "hellmann_energy_functional",
    "hellmann_total",
    "hw_channel_energy",
    "hw_minimize",
    "hw_remainder",
]


def alpha_channel(ell: int, q: int) -> float:
    """alpha_l = (pi / (q (2 l + 1)))^2."""
    return (np.pi / (q * (2 * ell + 1))) ** 2


@dataclass(frozen=True)
class ChannelDensity:
    """One-dimensional channel density varrho_l with occupation bookkeeping."""

    ell: int
    grid: RadialGrid
    values: np.ndarray
    q: int = 1

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if np.any(values < 0.0):
            raise ValueError("channel density must be nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def number(self) -> float:
        """Total electrons in the channel, q (2l+1) n_l."""
        return self.grid.integrate(self.values)

    @property
    def n_ell(self) -> float:
        return self.number / (self.q * (2 * self.ell + 1))

    @property
    def eps_ell(self) -> float:
        return self.n_ell - np.floor(self.n_ell)


@dataclass(frozen=True)
class HWChannelResult:
    ell: int
    alpha_ell: float
    weizsacker: float
    centrifugal: float
    cubic: float
    attraction: float

    @property
    def total(self) -> float:
        return (self.weizsacker + self.centrifugal + self.cubic
                - self.attraction)


# ---------------------------------------------------------------------------
# Hellmann channels (no gradient term, pointwise minimization)
# ---------------------------------------------------------------------------

def hellmann_support(ell: int, z: float, mu: float):
    """Classically allowed interval of z/r - (l+1/2)^2/(2 r^2) - mu.

    Returns (r_inner, r_outer) or None if empty; r_outer is inf at mu = 0.
    """
    big_l = ell + 0.5
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    if mu == 0.0:
        return (big_l**2 / (2.0 * z), np.inf)
    disc = z * z - 2.0 * big_l**2 * mu
    if disc <= 0.0:
        return None
    root = np.sqrt(disc)
    u_plus = (z + root) / big_l**2
    u_minus = (z - root) / big_l**2
    return (1.0 / u_plus, 1.0 / u_minus)


def hellmann_channel_min(ell: int, z: float, mu: float, cfg: TFConfig,
                         n_theta: int = 600) -> dict:
    """Pointwise minimizer of the Hellmann channel functional at fixed mu.

    varrho*(r) = sqrt(2 (z/r - (l+1/2)^2/(2r^2) - mu)_+ / alpha_l); the
    channel particle number and energy are evaluated by quadrature in the
    angle variable that absorbs the square-root edges.  An empty allowed
    region gives the zero density.
    """
    alpha = alpha_channel(ell, cfg.q)
    big_l = ell + 0.5

    def rho_of(r):
        r = np.asarray(r, dtype=float)
        w = z / r - big_l**2 / (2.0 * r * r)
        return np.sqrt(np.clip(2.0 * (w - mu) / alpha, 0.0, None))

    support = hellmann_support(ell, z, mu)
    if support is None:
        return {"ell": ell, "number": 0.0, "energy": 0.0, "support": None,
                "rho": rho_of}
    if not np.isfinite(support[1]):
        raise ValueError("mu = 0 leaves the channel number unbounded")
    u_minus, u_plus = 1.0 / support[1], 1.0 / support[0]
    mid, half = 0.5 * (u_plus + u_minus), 0.5 * (u_plus - u_minus)
    theta = np.linspace(0.0, np.pi, n_theta)
    u = mid - half * np.cos(theta)
    rho_u = (big_l / np.sqrt(alpha)) * half * np.sin(theta)
    w = z * u - 0.5 * big_l**2 * u * u
    # int f varrho dr = int f(1/u) varrho / u^2 du, du = half sin(theta)
    base = rho_u * half * np.sin(theta) / (u * u)
    number = np.trapezoid(base, theta)
    energy = np.trapezoid(base * (-(2.0 / 3.0) * w - mu / 3.0), theta)
    return {"ell": ell, "number": number, "energy": energy,
            "support": support, "rho": rho_of}


def hellmann_energy_functional(values: np.ndarray, ell: int, z: float,
                               cfg: TFConfig, grid: RadialGrid,
                               mu: float = 0.0) -> float:
    """Hellmann channel functional (plus mu * number if mu is nonzero)."""
    alpha = alpha_channel(ell, cfg.q)
    big_l = ell + 0.5
    r = grid.nodes
    integrand = (0.5 * (alpha / 3.0) * values**3
                 + 0.5 * big_l**2 / (r * r) * values
                 - z / r * values + mu * values)
    return grid.integrate(integrand)


def hellmann_total(n_electrons: float, z: float, cfg: TFConfig,
                   ell_max: int | None = None) -> dict:
    """Sum of Hellmann channel minima with mu fixing the total number.

    Reproduces the repulsion-free TF energy up to O(Z^2 N^(-1/3)).
    """
    if n_electrons <= 0.0 or z <= 0.0:
        raise ValueError("N and Z must be positive")
    if ell_max is None:
        ell_max = 2 * int(np.ceil((3.0 * z / cfg.q) ** (1.0 / 3.0))) + 2

    def total_number(mu):
        return sum(hellmann_channel_min(ell, z, mu, cfg)["number"]
                   for ell in range(ell_max + 1))

    lo, hi = 1e-12 * z * z, 2.0 * z * z
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        if total_number(mid) > n_electrons:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-12:
            break
    mu = np.sqrt(lo * hi)
    channels = [hellmann_channel_min(ell, z, mu, cfg)
                for ell in range(ell_max + 1)]
    return {
        "mu": mu,
        "energy": sum(c["energy"] for c in channels),
        "numbers": np.array([c["number"] for c in channels]),
        "channels": channels,
    }


# ---------------------------------------------------------------------------
# Hellmann-Weizsacker channels
# ---------------------------------------------------------------------------

def _log_derivative(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """4th-order d/dr on the uniform-in-log grid."""
    r = grid.nodes
    t = np.log(r)
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-8):
        return np.gradient(values, r)
    dv = np.empty_like(values)
    dv[2:-2] = (-values[4:] + 8 * values[3:-1]
                - 8 * values[1:-3] + values[:-4]) / (12 * h)
    dv[:2] = np.gradient(values[:6], t[:6])[:2]
    dv[-2:] = np.gradient(values[-6:], t[-6:])[-2:]
    return dv / r


def hw_channel_energy(chan: ChannelDensity, z: float,
                      cfg: TFConfig) -> HWChannelResult:
    """Evaluate the Weizsacker-corrected channel functional by quadrature."""
    if np.any(chan.values < 0.0):
        raise ValueError("negative channel density")
    grid = chan.grid
    r = grid.nodes
    alpha = alpha_channel(chan.ell, cfg.q)
    sqrt_rho = np.sqrt(chan.values)
    dsq = _log_derivative(sqrt_rho, grid)
    weiz = 0.5 * grid.integrate(dsq * dsq)
    centr = 0.5 * chan.ell * (chan.ell + 1) \
        * grid.integrate(chan.values / (r * r))
    cubic = 0.5 * (alpha / 3.0) * grid.integrate(chan.values**3)
    attraction = z * grid.integrate(chan.values / r)
    return HWChannelResult(ell=chan.ell, alpha_ell=alpha, weizsacker=weiz,
                           centrifugal=centr, cubic=cubic,
                           attraction=attraction)


@dataclass(frozen=True)
class HWSolution:
    mu: float
    channels: list
    results: list
    grid: RadialGrid

    @property
    def total_energy(self) -> float:
        return sum(res.total for res in self.results)

    @property
    def total_number(self) -> float:
        return sum(chan.number for chan in self.channels)


class HWConvergenceError(RuntimeError):
    pass


def _hw_channel_solve(ell: int, z: float, mu: float, alpha: float,
                      grid: RadialGrid, v0: np.ndarray | None = None):
    """Damped Newton for the channel v-equation at fixed mu.

    Minimizes (1/2) int v'^2 + (1/2) l(l+1) v^2/r^2 + (alpha/6) v^6
    - int (z/r - mu·) ... i.e. the grand channel functional in v = sqrt(rho).
    Returns the minimizing v (possibly ~0 when the channel is unoccupied).
    """
    r, wq = grid.nodes, grid.weights
    n = r.size
    h = np.diff(r)
    main = np.zeros(n)
    main[:-1] += 1.0 / h
    main[1:] += 1.0 / h
    off = -1.0 / h
    lin = ell * (ell + 1) / (r * r) - 2.0 * z / r + 2.0 * mu

    def energy(v):
        d = np.diff(v)
        return 0.5 * float(np.sum(d * d / h)) \
            + 0.5 * float(np.dot(wq, lin * v * v)) \
            + (alpha / 6.0) * float(np.dot(wq, v**6))

    def grad(v):
        out = main * v
        out[:-1] += off * v[1:]
        out[1:] += off * v[:-1]
        out += wq * (lin * v + alpha * v**5)
        out[0] = out[-1] = 0.0
        return out

    if v0 is None:
        big_l = ell + 0.5
        w_cl = z / r - big_l**2 / (2.0 * r * r) - mu
        v0 = np.sqrt(np.sqrt(np.clip(2.0 * w_cl / alpha, 0.0, None)))
        v0 = np.maximum(v0, 1e-6 * v0.max() if v0.max() > 0 else 1e-8)
    v = v0.copy()
    v[0] = v[-1] = 0.0
    e = energy(v)
    for _ in range(120):
        g = grad(v)
        gnorm = np.sqrt(float(np.sum(g * g)))
        shift = 1e-12
        d = None
        for _ in range(30):
            ab = np.zeros((2, n))
            ab[0, 1:] = off
            ab[1] = main + wq * (lin + 5.0 * alpha * v**4) + shift
            ab[1][0] = ab[1][-1] = 1.0
            ab[0][1] = ab[0][-1] = 0.0
            try:
                d = solveh_banded(ab, g)
                break
            except np.linalg.LinAlgError:
                shift = max(shift * 10.0, 1e-8 * (1.0 + abs(mu)))
        if d is None:
            raise HWConvergenceError(f"channel ell={ell}: no SPD shift")
        step = 1.0
        improved = False
        for _ in range(40):
            trial = v - step * d
            trial[0] = trial[-1] = 0.0
            e_t = energy(trial)
            if e_t < e:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        v, e = trial, e_t
        if gnorm < 1e-12 * (1.0 + abs(e)):
            break
    return np.abs(v)


def hw_minimize(n_electrons: float, z: float, cfg: TFConfig,
                ell_max: int | None = None,
                grid: RadialGrid | None = None,
                number_tol: float = 1e-8) -> HWSolution:
    """Per-channel Newton minimization with a shared chemical potential.

    The outer bisection drives the summed channel numbers to N; channels
    whose linear part cannot bind at the current mu stay empty.
    """
    if n_electrons <= 0.0 or z <= 0.0:
        raise ValueError("N and Z must be positive")
    if grid is None:
        grid = default_grid()
    if ell_max is None:
        ell_max = 2 * int(np.ceil((3.0 * z / cfg.q) ** (1.0 / 3.0)))
    alphas = [alpha_channel(ell, cfg.q) for ell in range(ell_max + 1)]
    warm = {}

    def solve_all(mu):
        chans = []
        for ell in range(ell_max + 1):
            # unoccupied once mu exceeds the deepest channel level
            if mu >= z * z / (2.0 * (ell + 1.0) ** 2):
                chans.append(np.zeros(grid.size))
                continue
            v = _hw_channel_solve(ell, z, mu, alphas[ell], grid,
                                  v0=warm.get(ell))
            warm[ell] = v
            chans.append(v * v)
        return chans

    lo, hi = 1e-10 * z * z, 2.0 * z * z
    mid = np.sqrt(lo * hi)
    for _ in range(100):
        mid = np.sqrt(lo * hi)
        n_mid = sum(grid.integrate(c) for c in solve_all(mid))
        if n_mid > n_electrons:
            lo = mid
        else:
            hi = mid
        if abs(n_mid - n_electrons) < number_tol * n_electrons:
            break
    mu = mid
    channel_values = solve_all(mu)
    channels = [ChannelDensity(ell=ell, grid=grid, values=vals, q=cfg.q)
                for ell, vals in enumerate(channel_values)]
    results = [hw_channel_energy(chan, z, cfg) for chan in channels]
    return HWSolution(mu=mu, channels=channels, results=results, grid=grid)


def hw_remainder(channels: list, cfg: TFConfig) -> float:
    """Correction term of the many-body upper bound built on channel sums.

    R = sum_l (alpha_l/3) [(-1 + 6 e - 3 e^2)/n^2 + (2 e^3 - 6 e^2 + 4 e)/n^3]
        * int varrho_l^3,   over channels with n_l != 0.
    """
    total = 0.0
    for chan in channels:
        n_l = chan.n_ell
        if n_l == 0.0:
            continue
        eps = chan.eps_ell
        alpha = alpha_channel(chan.ell, cfg.q)
        cube = chan.grid.integrate(chan.values**3)
        total += (alpha / 3.0) * (
            (-1.0 + 6.0 * eps - 3.0 * eps * eps) / n_l**2
            + (2.0 * eps**3 - 6.0 * eps * eps + 4.0 * eps) / n_l**3) * cube
    return total
