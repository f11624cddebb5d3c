"""Shared numerical substrate: radial grids, quadrature, special functions.

Everything downstream (density functionals, spectra, densities) is built on
the logarithmic radial grid and the helpers defined here.  All functions are
pure; grids and densities are treated as immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import cholesky, eigh

__all__ = [
    "GridMismatchError",
    "NotPositiveDefiniteError",
    "RadialGrid",
    "RadialDensity",
    "Quadrature",
    "default_grid",
    "log_grid",
    "spherical_bessel_kernel",
    "assoc_laguerre",
    "coulomb_inner",
    "sym_eig",
]


class GridMismatchError(ValueError):
    """Two radial quantities live on different node sets."""


class NotPositiveDefiniteError(ValueError):
    """Overlap matrix passed to the eigensolver is not positive definite."""


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radial nodes with quadrature weights for int_0^inf f(r) dr.

    The default construction is logarithmic with trapezoid weights in the
    log variable plus a rectangle closure of the [0, r_min] segment, so that
    integrals of cusp-free integrands are reproduced to ~1e-11.  `tolerance`
    declares the accuracy the weights are good for on smooth decaying
    integrands.
    """

    nodes: np.ndarray
    weights: np.ndarray
    r_min: float
    r_max: float
    tolerance: float = 1e-10

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("need at least two radial nodes")
        if not np.all(np.diff(nodes) > 0.0) or nodes[0] <= 0.0:
            raise ValueError("nodes must be strictly increasing and positive")
        if not np.all(weights > 0.0):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        nodes.setflags(write=False)
        weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature of samples against the grid weights."""
        return float(np.dot(self.weights, values))

    def same_nodes(self, other: "RadialGrid") -> bool:
        return self.size == other.size and np.array_equal(self.nodes, other.nodes)


def log_grid(n: int = 2000, r_min: float = 1e-6, r_max: float = 1e4,
             tolerance: float = 1e-10) -> RadialGrid:
    """Logarithmic grid with trapezoid-in-log weights and origin closure."""
    t = np.linspace(np.log(r_min), np.log(r_max), n)
    r = np.exp(t)
    h = t[1] - t[0]
    w = h * r
    w[0] *= 0.5
    w[-1] *= 0.5
    # Close [0, r_min] with a rectangle; exact for integrands ~const near 0.
    w[0] += r_min
    return RadialGrid(nodes=r, weights=w, r_min=r_min, r_max=r_max,
                      tolerance=tolerance)


def default_grid() -> RadialGrid:
    """The default 2000-node grid on [1e-6, 1e4] atomic units."""
    return log_grid()


@dataclass(frozen=True)
class RadialDensity:
    """Samples of a spherically symmetric density on a radial grid.

    `dimension` tags the meaning of `values`: "3d" for a volume density
    rho(r) (particles per volume, integrated with 4 pi r^2 dr) and "1d" for
    a channel density (particles per length, integrated with dr).
    """

    grid: RadialGrid
    values: np.ndarray
    dimension: str = "3d"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise GridMismatchError("density samples do not match the grid")
        if self.dimension not in ("3d", "1d"):
            raise ValueError("dimension tag must be '3d' or '1d'")
        if np.any(values < 0.0):
            raise ValueError("density values must be nonnegative")
        object.__setattr__(self, "values", values)
        values.setflags(write=False)

    @property
    def particle_number(self) -> float:
        r = self.grid.nodes
        if self.dimension == "3d":
            return self.grid.integrate(4.0 * np.pi * r * r * self.values)
        return self.grid.integrate(self.values)


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre rule mapped onto [a, b]; exact for degree <= 2*order-1."""

    order: int
    a: float
    b: float
    scheme: str = "gauss-legendre"
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.scheme != "gauss-legendre":
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        x, w = leggauss(self.order)
        half = 0.5 * (self.b - self.a)
        mid = 0.5 * (self.b + self.a)
        object.__setattr__(self, "nodes", mid + half * x)
        object.__setattr__(self, "weights", half * w)

    @property
    def exact_degree(self) -> int:
        return 2 * self.order - 1

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_panels(edges: np.ndarray, order: int = 40):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    edges = np.asarray(edges, dtype=float)
    x, w = leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def _sph_jn_upward(ell: int, x: np.ndarray) -> np.ndarray:
    """x * j_ell(x) by upward recurrence; stable for x >~ ell."""
    u0 = np.sin(x)                      # x j_0
    if ell == 0:
        return u0
    with np.errstate(invalid="ignore", divide="ignore"):
        u1 = u0 / x - np.cos(x)         # x j_1
    if ell == 1:
        return u1
    um, uc = u0, u1
    for n in range(1, ell):
        um, uc = uc, (2 * n + 1) / x * uc - um
    return uc


def _sph_jn_miller(ell: int, x: np.ndarray) -> np.ndarray:
    """x * j_ell(x) by backward (Miller) recurrence; for x <~ ell."""
    start = ell + max(16, int(np.ceil(np.sqrt(40.0 * (ell + 1)))))
    up = np.zeros_like(x)
    uc = np.full_like(x, 1e-290)
    target = np.zeros_like(x)
    for n in range(start, 0, -1):
        prev = (2 * n + 1) / x * uc - up
        up, uc = uc, prev
        if n - 1 == ell:
            target = uc.copy()
        big = np.abs(uc) > 1e260
        if np.any(big):
            up[big] *= 1e-260
            uc[big] *= 1e-260
            target[big] *= 1e-260
    # uc now holds the unnormalized x*j_0; true value is sin(x).
    return target * (np.sin(x) / uc)


def spherical_bessel_kernel(ell: int, k, r):
    """Fourier-Bessel kernel sqrt(k r) * J_{ell+1/2}(k r).

    Equals sqrt(2/pi) * (k r) * j_ell(k r); vanishes at k = 0 or r = 0.
    Stable for k*r up to 1e4 and moderate ell via trigonometric upward
    recurrence in the oscillatory regime and Miller backward recurrence
    below the turning point.
    """
    if ell < 0:
        raise ValueError("ell must be a nonnegative integer")
    x = np.asarray(k, dtype=float) * np.asarray(r, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    out = np.zeros_like(x)
    pos = x > 0.0
    if np.any(pos):
        xp = x[pos]
        res = np.empty_like(xp)
        hi = xp >= ell + 1.0
        if np.any(hi):
            res[hi] = _sph_jn_upward(ell, xp[hi])
        if np.any(~hi):
            res[~hi] = _sph_jn_miller(ell, xp[~hi])
        out[pos] = _SQRT_2_OVER_PI * res
    return float(out[0]) if scalar else out


def assoc_laguerre(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^alpha(x) by three-term recurrence.

    Requires n >= 0, alpha > -1, x >= 0.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if alpha <= -1.0:
        raise ValueError("alpha must exceed -1")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    lm = np.ones_like(x)
    if n == 0:
        return float(lm[0]) if scalar else lm
    lc = 1.0 + alpha - x
    for k in range(1, n):
        lm, lc = lc, ((2 * k + 1 + alpha - x) * lc - (k + alpha) * lm) / (k + 1)
    return float(lc[0]) if scalar else lc


# ---------------------------------------------------------------------------
# Coulomb inner product
# ---------------------------------------------------------------------------

def coulomb_inner(rho: RadialDensity, sigma: RadialDensity) -> float:
    """Electrostatic inner product D(rho, sigma) = (1/2) iint rho sigma / |x-y|.

    Both densities must carry the "3d" tag and share the same node set
    (no interpolation is attempted).  Uses the Newton shell reduction
    1/max(r, s) for spherically symmetric charges; the cumulative-sum
    evaluation reproduces the full double sum exactly.
    """
    if rho.dimension != "3d" or sigma.dimension != "3d":
        raise ValueError("coulomb_inner expects 3d-tagged densities")
    if not rho.grid.same_nodes(sigma.grid):
        raise GridMismatchError("densities live on different node sets")
    r = rho.grid.nodes
    w = rho.grid.weights
    f = w * r * r * rho.values                 # weighted shell charges of rho
    g = w * r * r * sigma.values
    # inner potential of sigma at r_i: sum_{r_j <= r_i} g_j / r_i + sum_{r_j > r_i} g_j / r_j
    cum = np.cumsum(g)
    outer = np.cumsum((g / r)[::-1])[::-1]
    inner_pot = cum / r
    outer_pot = np.concatenate([outer[1:], [0.0]])
    s = np.dot(f, inner_pot + outer_pot)
    return 0.5 * (4.0 * np.pi) ** 2 * s


# ---------------------------------------------------------------------------
# Dense symmetric (generalized) eigensolver
# ---------------------------------------------------------------------------

def sym_eig(h: np.ndarray, s: np.ndarray | None = None):
    """All eigenpairs of H x = lambda S x, ascending.

    H must be symmetric to 1e-12 relative; S, if given, symmetric positive
    definite.  Returns (eigenvalues, eigenvectors) with columns as vectors;
    the residual ||H x - lambda S x|| <= 1e-9 ||H|| is verified per pair.
    """
    h = np.asarray(h, dtype=float)
    norm_h = np.linalg.norm(h)
    if norm_h > 0.0 and np.linalg.norm(h - h.T) > 1e-12 * norm_h:
        raise ValueError("matrix H is not symmetric to 1e-12 relative")
    if s is not None:
        s = np.asarray(s, dtype=float)
        try:
            cholesky(s, lower=True)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError("overlap matrix is not positive definite")
        except Exception as exc:  # scipy raises LinAlgError from its own module
            raise NotPositiveDefiniteError(str(exc))
    vals, vecs = eigh(h, s)
    rhs = vecs * vals if s is None else (s @ vecs) * vals
    resid = np.linalg.norm(h @ vecs - rhs, axis=0)
    tol = 1e-9 * max(norm_h, 1.0e-300)
    if np.any(resid > tol):
        raise ArithmeticError("eigenpair residual exceeds 1e-9 * ||H||")
    return vals, vecs
