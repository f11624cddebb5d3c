"""Rayleigh-Ritz spectra of the Chandrasekhar channel operators.

The basis in each angular momentum channel is the L^2-orthonormal Laguerre
family r^(l+1) e^(-beta r) L_i^(2l+2)(2 beta r).  The momentum-squared
matrix is assembled exactly by Gauss-Laguerre quadrature; diagonalizing it
yields the Gauss nodes and weights of the basis-induced spectral measure,
so the relativistic kinetic operator sqrt(p^2+1)-1 is evaluated as a
k-space quadrature over those nodes.  By operator concavity this stays a
variational upper bound.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre


@lru_cache(maxsize=128)
def _gauss_laguerre(nq: int, alpha: int):
    x, w = roots_genlaguerre(nq, alpha)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w

from .types import GAMMA_CHANDRASEKHAR, SpectrumEntry, SpectrumTable

__all__ = [
    "chandra_channel_matrix",
    "chandra_spectrum",
    "rho_channel_C",
    "sigma_maps",
    "VariationalCollapseError",
]


class VariationalCollapseError(RuntimeError):
    """Pencil value below -1: the quadrature/basis failed variationally."""


def _norm_laguerre(alpha: float, size: int, x: np.ndarray) -> np.ndarray:
    """Orthonormal Laguerre values Lhat_k(x), k < size; shape [size, len(x)]."""
    out = np.empty((size, x.size))
    out[0] = 1.0
    if size > 1:
        out[1] = (1.0 + alpha - x) / np.sqrt(1.0 + alpha)
    for k in range(1, size - 1):
        a1 = np.sqrt((k + 1.0) / (k + 1.0 + alpha)) \
            * (2.0 * k + alpha + 1.0 - x) / (k + 1.0)
        a2 = np.sqrt(k * (k + alpha) / ((k + 1.0) * (k + 1.0 + alpha)))
        out[k + 1] = a1 * out[k] - a2 * out[k - 1]
    # fold in the normalization of Lhat_0 = 1/sqrt(Gamma(alpha+1))
    out *= np.exp(-0.5 * math.lgamma(alpha + 1.0))
    return out


def _basis_on_radii(ell: int, beta: float, size: int,
                    r: np.ndarray) -> np.ndarray:
    """Basis values b_i(r) = sqrt(2 beta) x^(alpha/2) e^(-x/2) Lhat_i(x)."""
    alpha = 2.0 * ell + 2.0
    x = 2.0 * beta * r
    weight = np.exp(0.5 * alpha * np.log(np.maximum(x, 1e-300)) - 0.5 * x)
    tab = _norm_laguerre(alpha, size, x)
    return np.sqrt(2.0 * beta) * weight[None, :] * tab


def _p2_and_coulomb(ell: int, beta: float, size: int):
    """Exact matrices of p_l^2 and 1/r in the orthonormal channel basis."""
    alpha = 2.0 * ell + 2.0
    nq = size + ell + 8
    # kinetic: integrand x^(2l) e^(-x) * (polynomial), weight alpha' = 2l
    x, w = _gauss_laguerre(nq, 2 * ell)
    tab = _norm_laguerre(alpha, size, x)
    # x Lhat' = i Lhat_i - sqrt(i(i+alpha)) Lhat_{i-1}
    dtab = np.zeros_like(tab)
    iarr = np.arange(size, dtype=float)
    dtab[0] = 0.0
    for i in range(1, size):
        dtab[i] = (iarr[i] * tab[i] - np.sqrt(i * (i + alpha)) * tab[i - 1])
    # b' = sqrt(2 beta) 2 beta x^(alpha/2 - 1) e^(-x/2)
    #      [ (alpha/2 - x/2 + xLhat'/Lhat ... ] assembled directly:
    poly_i = (0.5 * alpha - 0.5 * x)[None, :] * tab + dtab
    # integral b_i' b_j' dr: the x^(alpha-2) e^(-x) factor is exactly the
    # alpha' = 2l Gauss-Laguerre weight, so the sum below is exact
    kin_grad = (2.0 * beta) ** 2 * (poly_i * w[None, :]) @ poly_i.T
    cent = ell * (ell + 1) * (2.0 * beta) ** 2 * (tab * w[None, :]) @ tab.T
    p2 = kin_grad + cent
    # Coulomb: weight alpha' = 2l + 1
    xc, wc = _gauss_laguerre(nq, 2 * ell + 1)
    tabc = _norm_laguerre(alpha, size, xc)
    coul = 2.0 * beta * (tabc * wc[None, :]) @ tabc.T
    return 0.5 * (p2 + p2.T), 0.5 * (coul + coul.T)


def _kinetic_from_p2(p2: np.ndarray, kind: str):
    """Spectral k-space quadrature of the kinetic multiplier on p^2."""
    k2, v = np.linalg.eigh(p2)
    k2 = np.clip(k2, 0.0, None)
    if kind == "relativistic":
        vals = k2 / (np.sqrt(k2 + 1.0) + 1.0)      # sqrt(k^2+1) - 1, stable
    elif kind == "schrodinger":
        vals = 0.5 * k2
    else:
        raise ValueError(f"unknown kinetic kind {kind!r}")
    return (v * vals[None, :]) @ v.T, float(np.sqrt(k2.max()))


def chandra_channel_matrix(ell: int, gamma: float, basis_size: int = 120,
                           beta: float | None = None,
                           kinetic: str = "relativistic"):
    """(H, S) matrices of the channel operator in the Laguerre basis.

    S is the identity (the basis is orthonormal); the kinetic part is the
    k-space quadrature induced by the basis (nodes = momentum eigenvalues
    of the compressed p_l^2, exact for the compressed operator), minus
    gamma times the analytic Coulomb matrix.  Metadata reports the largest
    momentum node; contributions beyond it are pushed variationally upward,
    never below.
    """
    if gamma < 0.0 or gamma > GAMMA_CHANDRASEKHAR + 1e-2:
        raise ValueError("gamma outside the Chandrasekhar range")
    if basis_size > 200:
        raise ValueError("basis_size is capped at 200")
    if beta is None:
        beta = max(gamma, 0.05) / (ell + 1.0)
    p2, coul = _p2_and_coulomb(ell, beta, basis_size)
    kin, k_max = _kinetic_from_p2(p2, kinetic)
    h = kin - gamma * coul
    meta = {"beta": beta, "k_max": k_max, "kinetic": kinetic,
            "tail_bound": "variational: truncation only raises eigenvalues"}
    return 0.5 * (h + h.T), np.eye(basis_size), meta


def _beta_candidates(ell: int, gamma: float, n_keep: int):
    g = max(gamma, 0.05)
    # shell-matched exponents make the nonrelativistic shells exactly
    # representable; the geometric sweep handles the contracted core that
    # develops near the critical coupling
    betas = [g / (ell + 1.0 + k) for k in range(n_keep + 5)]
    if gamma > 0.45:
        # contracted-core coverage matters near the critical coupling
        betas += list(g * np.geomspace(0.05, 40.0, 12) / (ell + 1.0))
    else:
        betas += list(g * np.geomspace(0.2, 8.0, 5) / (ell + 1.0))
    return sorted(set(betas))


def chandra_spectrum(ell: int, gamma: float, basis_size: int = 120,
                     n_keep: int = 8) -> SpectrumTable:
    """Lowest channel eigenvalues by Rayleigh-Ritz over several exponents.

    Each basis run gives upper bounds by Courant-Fischer, so the
    elementwise minimum over runs is the best upper bound per level.  A
    value at or below -1 signals quadrature/basis failure and raises.
    """
    best = None
    for beta in _beta_candidates(ell, gamma, n_keep):
        h, _, _ = chandra_channel_matrix(ell, gamma, basis_size, beta=beta)
        vals = np.linalg.eigvalsh(h)[:n_keep]
        best = vals if best is None else np.minimum(best, vals)
    if np.any(best <= -1.0):
        raise VariationalCollapseError(
            f"channel ell={ell}: pencil value {best.min():.6f} <= -1")
    neg = best[best < 0.0]
    c_low = float(np.max(-neg * (np.arange(neg.size) + ell + 1) ** 2
                         / gamma**2)) if neg.size and gamma > 0 else 0.0
    entries = [SpectrumEntry(n=i, channel=ell, eigenvalue=float(v),
                             degeneracy=2 * (2 * ell + 1), source="rayleigh_ritz")
               for i, v in enumerate(neg)]
    return SpectrumTable(entries=entries, metadata={
        "gamma": gamma, "ell": ell, "basis_size": basis_size,
        "lower_constant": c_low,
        "upper_bound_caveat": "Rayleigh-Ritz values bound the spectrum "
                              "from above",
    })


def rho_channel_C(ell: int, gamma: float, radii, basis_size: int = 140,
                  n_max: int = 8, q: int = 2, q_tail: int = 4) -> np.ndarray:
    """Channel density q(2l+1) sum_n |psi_n(r)|^2 from Rayleigh-Ritz vectors.

    Uses a single shell-averaged exponent for the eigenvectors and
    completes the principal tail with a c/n'^3 fit.
    """
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    beta = max(gamma, 0.05) / (ell + 2.0)
    h, _, _ = chandra_channel_matrix(ell, gamma, basis_size, beta=beta)
    vals, vecs = np.linalg.eigh(h)
    if np.any(vals[:1] <= -1.0):
        raise VariationalCollapseError("ground value below -1")
    basis_vals = _basis_on_radii(ell, beta, basis_size, radii)
    terms = []
    dens = np.zeros_like(radii)
    count = min(n_max, int(np.sum(vals < 0.0)))
    for i in range(count):
        psi = vecs[:, i] @ basis_vals
        term = psi * psi
        dens += term
        terms.append(term)
    if count >= q_tail + 1:
        npr = np.arange(count - q_tail, count, dtype=float) + ell + 1.0
        design = (npr**-3.0)[:, None]
        coef = np.linalg.lstsq(design, np.array(terms[-q_tail:]),
                               rcond=None)[0]
        from scipy.special import zeta

        dens += np.clip(coef[0], 0.0, None) * zeta(3.0, float(count + ell + 1))
    return q * (2 * ell + 1) * dens


def _phi_of_sigma(sigma: float) -> float:
    if sigma >= 1.0:
        return 2.0 / np.pi
    if sigma <= 0.0:
        return (1.0 - sigma) * np.tan(0.5 * np.pi * sigma)
    return (1.0 - sigma) * np.tan(0.5 * np.pi * sigma)


def sigma_maps(gamma: float) -> dict:
    """Strength maps of the two models' ground-state exponents.

    sigma_gamma inverts (1-sigma) tan(pi sigma / 2) = gamma on [0, 1]
    (Chandrasekhar range); Sigma_gamma = 1 - sqrt(1 - gamma^2) on [0, 1]
    (Coulomb-Dirac range).  Either entry is None outside its range.
    """
    if gamma < 0.0 or gamma > 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    out = {"Sigma": 1.0 - np.sqrt(1.0 - gamma * gamma)}
    if gamma <= GAMMA_CHANDRASEKHAR:
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _phi_of_sigma(mid) < gamma:
                lo = mid
            else:
                hi = mid
        out["sigma"] = 0.5 * (lo + hi)
    else:
        out["sigma"] = None
    return out
