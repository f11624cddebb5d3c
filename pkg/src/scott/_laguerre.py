"""Overflow-free evaluation of bound hydrogen radial functions.

The reduced radial function is
    psi_{n,l}(r) = (1/n') * x^(l+1) e^(-x/2) Lhat_n^(2l+1)(x),
with x = 2r/n', n' = n + l + 1 and Lhat the orthonormal Laguerre
polynomial sqrt(n!/Gamma(n+a+1)) L_n^a.  The weight is folded into the
recurrence seed so every intermediate stays O(1) in the classically
allowed region; forbidden-region values underflow harmlessly, and states
far outside their classical turning points are skipped outright.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit, prange

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is optional
    _HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True, parallel=True)
def _series_block(ell, n_count, r, rec_a, rec_b, rec_c,
                  out_sum, out_terms, term_lo):
    """Accumulate sum_n psi_{n,ell}(r)^2 for n = 0..n_count-1.

    rec_a[k] = sqrt((k+1)/(k+1+alpha)) / (k+1)
    rec_b[k] = 2k + alpha + 1
    rec_c[k] = sqrt(k (k+alpha) / ((k+1)(k+1+alpha)))
    Terms with n >= term_lo are stored individually in out_terms.
    """
    alpha = 2.0 * ell + 1.0
    lg2 = 0.5 * math.lgamma(alpha + 1.0)
    big_l = ell + 0.5
    for j in prange(r.shape[0]):
        rj = r[j]
        acc = 0.0
        for n in range(n_count):
            npr = n + ell + 1.0
            disc = 1.0 - (big_l / npr) ** 2
            sq = 0.0
            skip = False
            if disc > 0.0:
                root = math.sqrt(disc)
                r_outer = npr * npr * (1.0 + root)
                r_inner = big_l * big_l / (1.0 + root)
                if rj > 1.6 * r_outer + 40.0 or rj < 0.4 * r_inner - 40.0:
                    skip = True
            if not skip:
                x = 2.0 * rj / npr
                logw0 = (ell + 1.0) * math.log(x) - 0.5 * x - lg2
                if logw0 > -690.0:
                    w_prev = 0.0
                    w_curr = math.exp(logw0)
                    for k in range(n):
                        nxt = rec_a[k] * (rec_b[k] - x) * w_curr \
                            - rec_c[k] * w_prev
                        w_prev = w_curr
                        w_curr = nxt
                    val = w_curr / npr
                    sq = val * val
            acc += sq
            if n >= term_lo:
                out_terms[n - term_lo, j] = sq
        out_sum[j] = acc


def _recurrence_coeffs(ell: int, n_count: int):
    alpha = 2.0 * ell + 1.0
    k = np.arange(max(n_count, 1), dtype=np.float64)
    rec_a = np.sqrt((k + 1.0) / (k + 1.0 + alpha)) / (k + 1.0)
    rec_b = 2.0 * k + alpha + 1.0
    rec_c = np.sqrt(k * (k + alpha) / ((k + 1.0) * (k + 1.0 + alpha)))
    return rec_a, rec_b, rec_c


def sum_psi_squared(ell: int, n_count: int, r: np.ndarray,
                    tail_window: int = 0):
    """Partial sum over principal levels plus the last `tail_window` terms.

    Returns (partial_sum, terms) where terms has shape
    [tail_window, r.size] holding psi^2 for the final window of n values.
    """
    r = np.ascontiguousarray(r, dtype=np.float64)
    out_sum = np.zeros(r.shape[0])
    term_lo = max(n_count - tail_window, 0)
    out_terms = np.zeros((n_count - term_lo, r.shape[0]))
    rec_a, rec_b, rec_c = _recurrence_coeffs(ell, n_count)
    _series_block(int(ell), int(n_count), r, rec_a, rec_b, rec_c,
                  out_sum, out_terms, term_lo)
    return out_sum, out_terms


def psi_nl(n: int, ell: int, r: np.ndarray) -> np.ndarray:
    """Reduced radial eigenfunction psi_{n,ell} = r R_{n,ell} at unit charge."""
    r = np.ascontiguousarray(np.atleast_1d(r), dtype=np.float64)
    npr = n + ell + 1.0
    x = 2.0 * r / npr
    alpha = 2.0 * ell + 1.0
    logw0 = np.where(x > 0.0, (ell + 1.0) * np.log(np.maximum(x, 1e-300))
                     - 0.5 * x - 0.5 * math.lgamma(alpha + 1.0), -np.inf)
    w_curr = np.where(logw0 > -690.0, np.exp(logw0), 0.0)
    w_prev = np.zeros_like(x)
    rec_a, rec_b, rec_c = _recurrence_coeffs(ell, n + 1)
    for k in range(n):
        w_prev, w_curr = w_curr, rec_a[k] * (rec_b[k] - x) * w_curr \
            - rec_c[k] * w_prev
    return w_curr / npr
