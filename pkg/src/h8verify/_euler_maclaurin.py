"""Euler-Maclaurin evaluation of weighted Hurwitz sums.

Computes  sum_j w_j * zeta(s, alpha_j)  (and optionally its s-derivative)
for a batch of s values.  zeta(s) is the single-term case alpha = 1, and a
Dirichlet L-function is q^-s times the term with alpha_a = a/q, w_a = chi(a).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import PoleError
from .special_functions import bernoulli_numbers

BERNOULLI_TERMS = 12
_B = bernoulli_numbers(2 * BERNOULLI_TERMS + 1)
# B_2k / (2k)!
_EM_COEF = [float(_B[2 * k]) / math.factorial(2 * k) for k in range(1, BERNOULLI_TERMS + 1)]

# keeps each (len(s), N * len(alpha)) block around 32 MB
_CHUNK_ENTRIES = 1 << 21


def default_terms(s: np.ndarray) -> int:
    """N = max(50, 2|s|): the tail expansion then converges like (|s| / 2 pi N)^{2k}."""
    return max(50, int(math.ceil(2.0 * float(np.max(np.abs(s), initial=0.0)))) + 1)


def _expm1_over(u: np.ndarray) -> np.ndarray:
    """(e^u - 1)/u with a series near 0."""
    small = np.abs(u) < 1e-2
    safe = np.where(small, 1.0, u)
    direct = np.expm1(safe) / safe
    series = np.zeros_like(u)
    term = np.ones_like(u)
    for k in range(1, 10):
        series = series + term
        term = term * u / (k + 1)
    return np.where(small, series, direct)


def _expm1_over_prime(u: np.ndarray) -> np.ndarray:
    """d/du of (e^u - 1)/u."""
    small = np.abs(u) < 1e-2
    safe = np.where(small, 1.0, u)
    direct = (np.exp(safe) * (safe - 1.0) + 1.0) / (safe * safe)
    series = np.zeros_like(u)
    for k in range(1, 10):
        series = series + k * u ** (k - 1) / math.factorial(k + 1)
    return np.where(small, series, direct)


def hurwitz_sum(s, alphas, weights, terms: int | None = None, derivative: bool = False):
    """sum_j weights[j] * zeta(s, alphas[j]) for an array of s.

    Returns (value, derivative-or-None) with the shape of ``s``.  With
    derivative=True the s-derivative is obtained by differentiating every
    Euler-Maclaurin term analytically.

    The pole term sum_j w_j b_j^{1-s}/(s-1) is rearranged as
    sum_j w_j (b_j^{1-s} - 1)/(s-1) + W/(s-1), W = sum w_j, so that
    weightings with W = 0 (non-principal characters) are regular at s = 1.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    alphas = np.asarray(alphas, dtype=float)
    weights = np.asarray(weights, dtype=complex)
    total_weight = complex(np.sum(weights))
    if abs(total_weight) > 1e-12 and np.any(np.abs(s - 1.0) <= 1e-12):
        raise PoleError("pole at s = 1")

    n_terms = default_terms(s) if terms is None else terms
    base = (np.arange(n_terms, dtype=float)[:, None] + alphas[None, :]).ravel()
    logs = np.log(base)
    w_flat = np.broadcast_to(weights[None, :], (n_terms, len(alphas))).ravel()

    value = np.empty(s.shape, dtype=complex)
    deriv = np.empty(s.shape, dtype=complex) if derivative else None
    step = max(1, _CHUNK_ENTRIES // max(1, len(base)))
    for start in range(0, len(s), step):
        ss = s[start:start + step]
        powers = np.exp(-np.outer(ss, logs)) * w_flat
        value[start:start + step] = powers.sum(axis=1)
        if derivative:
            deriv[start:start + step] = -(powers * logs).sum(axis=1)

    # tail, evaluated at b_j = N + alpha_j
    b = n_terms + alphas
    logb = np.log(b)
    s_col = s[:, None]
    bs = np.exp(-s_col * logb[None, :])          # b^{-s}
    u = (1.0 - s_col) * logb[None, :]
    e1 = _expm1_over(u)
    reg = np.where(np.abs(s_col - 1.0) <= 1e-300, 1.0, s_col - 1.0)
    regular_pole = -(weights * logb)[None, :] * e1
    value += regular_pole.sum(axis=1)
    if abs(total_weight) > 1e-12:
        value += total_weight / reg[:, 0]
    value += 0.5 * (weights[None, :] * bs).sum(axis=1)

    poch = s_col * np.ones_like(logb)[None, :]     # s (s+1) ... (s+2k-2)
    dpoch = np.ones_like(poch)
    bpow = bs / b[None, :]                          # b^{-s-2k+1} at k = 1
    inv_b2 = 1.0 / (b * b)
    for k, coef in enumerate(_EM_COEF, start=1):
        value += coef * (weights[None, :] * poch * bpow).sum(axis=1)
        if derivative:
            deriv += coef * (weights[None, :] * (dpoch - logb[None, :] * poch) * bpow).sum(axis=1)
        a1 = s_col + (2 * k - 1)
        a2 = s_col + 2 * k
        dpoch = dpoch * a1 * a2 + poch * (a1 + a2)
        poch = poch * a1 * a2
        bpow = bpow * inv_b2[None, :]

    if derivative:
        deriv += ((weights * logb * logb)[None, :] * _expm1_over_prime(u)).sum(axis=1)
        if abs(total_weight) > 1e-12:
            deriv -= total_weight / reg[:, 0] ** 2
        deriv += -0.5 * (weights[None, :] * logb[None, :] * bs).sum(axis=1)
        return value.reshape(shape), deriv.reshape(shape)
    return value.reshape(shape), None
