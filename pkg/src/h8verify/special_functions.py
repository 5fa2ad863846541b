"""Complex log-gamma / digamma and the digamma combinations behind the
critical-line argument.

All evaluators accept Python scalars or numpy arrays and return the same
shape.  Scalars come back as ``complex`` (or ``float`` where the quantity is
real by construction).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import PoleError, UnsupportedRegionError

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)
POLE_TOL = 1e-12

# asymptotic expansions are applied once Re(z) has been shifted past this
_SHIFT_TARGET = 10.0
_STIRLING_TERMS = 12


@lru_cache(maxsize=None)
def bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    """B_0 .. B_{count-1} (convention B_1 = -1/2), exact."""
    b = [Fraction(0)] * count
    for m in range(count):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b[m] = Fraction(1) if m == 0 else -acc / (m + 1)
    return tuple(b)


def even_bernoulli(k_max: int) -> list[float]:
    """[B_2, B_4, ..., B_{2 k_max}] as floats."""
    b = bernoulli_numbers(2 * k_max + 1)
    return [float(b[2 * k]) for k in range(1, k_max + 1)]


_B2K = even_bernoulli(_STIRLING_TERMS)
# coefficients B_2k / (2k) for digamma, B_2k / (2k (2k-1)) for loggamma
_PSI_COEF = [b / (2 * k) for k, b in enumerate(_B2K, start=1)]
_LG_COEF = [b / (2 * k * (2 * k - 1)) for k, b in enumerate(_B2K, start=1)]


@dataclass(frozen=True)
class CriticalStripPoint:
    """s = 1/2 + alpha + i*gamma_height together with a character parity."""

    alpha: float
    gamma_height: float
    delta: int = 0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 0.5):
            raise ValueError(f"alpha must lie in [0, 1/2], got {self.alpha}")
        if self.delta not in (0, 1):
            raise ValueError(f"delta must be 0 or 1, got {self.delta}")
        if not math.isfinite(self.gamma_height):
            raise ValueError("gamma_height must be finite")

    @property
    def s(self) -> complex:
        return complex(0.5 + self.alpha, self.gamma_height)

    def shifted_arguments(self) -> tuple[complex, complex, complex, complex]:
        """(s+d)/2, (1-s+d)/2, (conj(s)+d)/2, (1-conj(s)+d)/2.

        Built from alpha directly so that alpha = 0 gives bit-identical
        pairs, which is what makes the on-line cancellation exact.
        """
        c = 0.25 + 0.5 * self.delta
        a = 0.5 * self.alpha
        g = 0.5 * self.gamma_height
        return (complex(c + a, g), complex(c - a, -g), complex(c + a, -g), complex(c - a, g))


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def _check_poles(z: np.ndarray) -> None:
    near_int = np.abs(z - np.round(z.real)) <= POLE_TOL
    bad = near_int & (np.round(z.real) <= 0)
    if np.any(bad):
        raise PoleError(f"gamma pole at {z[bad].ravel()[0]}")


def _cot_pi(z: np.ndarray) -> np.ndarray:
    # exponential form that stays bounded for large |Im z|
    upper = z.imag >= 0
    w = np.exp(2j * np.pi * np.where(upper, z, -z))
    return np.where(upper, 1j * (w + 1) / (w - 1), 1j * (1 + w) / (1 - w))


def digamma(z):
    """Gamma'(z)/Gamma(z) for complex z, |z| <= 1e4.

    Reflection for Re z < 1/2, upward recurrence to Re z >= 10, then the
    asymptotic series with 12 Bernoulli terms.
    """
    z, scalar = _as_complex_array(z)
    _check_poles(z)
    if np.any(np.abs(z) > 1e4 + 1):
        raise UnsupportedRegionError("digamma supported for |z| <= 1e4")
    reflect = z.real < 0.5
    w = np.where(reflect, 1.0 - z, z)

    shifts = np.maximum(0, np.ceil(_SHIFT_TARGET - w.real)).astype(int)
    acc = np.zeros_like(w)
    for k in range(int(shifts.max(initial=0))):
        acc = acc + np.where(k < shifts, 1.0 / (w + k), 0.0)
    y = w + shifts
    inv2 = 1.0 / (y * y)
    series = np.zeros_like(y)
    power = np.ones_like(y)
    for c in _PSI_COEF:
        power = power * inv2
        series = series + c * power
    psi = np.log(y) - 0.5 / y - series - acc
    if np.any(reflect):
        psi = np.where(reflect, psi - np.pi * _cot_pi(z), psi)
    return complex(psi) if scalar else psi


def loggamma(z):
    """A branch of log Gamma(z), continuous off the negative real axis.

    Downward recurrence from Re z >= 10 via principal logs; matches the
    principal log-gamma for Re z > 0.  Only Re z > -50 is supported, which
    covers every Gamma factor in the completed zeta and L-functions.
    """
    z, scalar = _as_complex_array(z)
    _check_poles(z)
    if np.any(z.real <= -50):
        raise UnsupportedRegionError("loggamma supported for Re z > -50")
    shifts = np.maximum(0, np.ceil(_SHIFT_TARGET - z.real)).astype(int)
    acc = np.zeros_like(z)
    for k in range(int(shifts.max(initial=0))):
        acc = acc + np.where(k < shifts, np.log(z + k), 0.0)
    y = z + shifts
    inv = 1.0 / y
    inv2 = inv * inv
    series = np.zeros_like(y)
    power = inv.copy()
    for c in _LG_COEF:
        series = series + c * power
        power = power * inv2
    lg = (y - 0.5) * np.log(y) - y + 0.5 * LOG_2PI + series - acc
    return complex(lg) if scalar else lg


def _pole_check_scalar(z: complex) -> None:
    _check_poles(np.asarray(z, dtype=complex))


def digamma_diff(z1: complex, z2: complex) -> complex:
    """sum_{n>=0} (1/(n+z2) - 1/(n+z1))  ==  digamma(z1) - digamma(z2).

    Summed term by term (never through ``digamma``) up to
    n = max(1e4, 20(|z1|+|z2|)), then closed with the Euler-Maclaurin
    integral tail log((M+z1)/(M+z2)) + f(M)/2 - f'(M)/12, whose neglected
    remainder is O(|z1-z2| / M^4).
    """
    z1, z2 = complex(z1), complex(z2)
    _pole_check_scalar(z1)
    _pole_check_scalar(z2)
    if z1 == z2:
        return 0j
    m = int(max(10_000, 20 * (abs(z1) + abs(z2))))
    n = np.arange(m, dtype=float)
    head = np.sum((z1 - z2) / ((n + z1) * (n + z2)))
    a, b = m + z1, m + z2
    f = 1.0 / b - 1.0 / a
    fprime = -1.0 / b**2 + 1.0 / a**2
    tail = np.log(a / b) + 0.5 * f - fprime / 12.0
    return complex(head + tail)


def gamma_combination(p: CriticalStripPoint) -> complex:
    """psi((s+d)/2) + psi((1-s+d)/2) - psi((conj s+d)/2) - psi((1-conj s+d)/2).

    Anti-conjugate in the two pairs, hence purely imaginary; zero whenever
    alpha = 0 or the height is 0.
    """
    w1, w2, w3, w4 = p.shifted_arguments()
    vals = digamma(np.array([w1, w2, w3, w4]))
    return complex((vals[0] + vals[1]) - (vals[2] + vals[3]))


def _g_terms(c: np.ndarray, gamma: float, alpha: float) -> np.ndarray:
    a = 0.25 * (gamma * gamma + alpha * alpha)
    return gamma * c / ((c * c - a) ** 2 + gamma * gamma * c * c)


def _g_tail_integral(c0: float, gamma: float, alpha: float) -> float:
    """Closed form of int_{c0}^inf gamma c / ((c^2-a)^2 + gamma^2 c^2) dc."""
    b = 0.5 * (gamma * gamma - alpha * alpha)
    k = 0.5 * alpha * gamma
    base = c0 * c0 + 0.5 * b
    x = k / base
    ratio = math.atan(x) / x if x > 1e-8 else 1.0 - x * x / 3.0
    return 0.5 * gamma / base * ratio


def g_sum_with_bound(p: CriticalStripPoint, target: float = 1e-12) -> tuple[float, float]:
    """(value, certified absolute error) for the positive series.

    Terms are decreasing once c^2 >= (gamma^2+alpha^2)/4, so the tail beyond
    the cut M satisfies I(c_M) <= tail <= I(c_M) + t(c_M); the midpoint is
    used and t(c_M)/2 is the bound.
    """
    gamma = abs(p.gamma_height)
    sign = 1.0 if p.gamma_height >= 0 else -1.0
    if gamma == 0.0:
        return 0.0, 0.0
    alpha = p.alpha
    offset = 0.5 * p.delta + 0.25
    a = 0.25 * (gamma * gamma + alpha * alpha)
    m = int(max(10_000, 20 * (abs(p.s) + gamma)))
    # t(c) < gamma / c^3 for c^2 >= a; choose M so that half of it meets target
    m = max(m, int(math.ceil((gamma / (2 * target)) ** (1 / 3))) + 1, int(math.sqrt(a)) + 2)
    c = np.arange(m, dtype=float) + offset
    head = float(np.sum(_g_terms(c, gamma, alpha)))
    c_m = m + offset
    t_m = float(_g_terms(np.array([c_m]), gamma, alpha)[0])
    tail = _g_tail_integral(c_m, gamma, alpha) + 0.5 * t_m
    return sign * (head + tail), 0.5 * t_m


def paper_g_sum(p: CriticalStripPoint) -> float:
    """sum_{n>=0} gamma c_n / ((c_n^2 - gamma^2/4 - alpha^2/4)^2 + gamma^2 c_n^2),
    c_n = n + delta/2 + 1/4, certified to 1e-12.

    Every term has the sign of gamma, so the sum is positive for positive
    heights and vanishes at height 0.
    """
    value, _ = g_sum_with_bound(p)
    return value


@dataclass(frozen=True)
class ReductionReport:
    """Both sides of the bracket-sum -> alpha*gamma*(...) reduction."""

    bracket_sum: complex      # series of reciprocal differences, summed directly
    combination: complex      # four-term digamma evaluation
    printed_form: float       # alpha * paper_g_sum, the reduced expression as printed
    residual: float           # |Im(combination) - printed_form|
    ratio: float              # Im(combination) / printed_form (nan when printed_form == 0)


def reduction_residual(p: CriticalStripPoint) -> ReductionReport:
    """Measure the bracket-sum reduction numerically.  Reports, never asserts."""
    w1, w2, w3, w4 = p.shifted_arguments()
    # bracket order: 1/(n+(1-s̄+d)/2) - 1/(n+(s+d)/2), 1/(n+(s̄+d)/2) - 1/(n+(1-s+d)/2)
    bracket = digamma_diff(w1, w4) + digamma_diff(w2, w3)
    comb = gamma_combination(p)
    printed = p.alpha * paper_g_sum(p)
    residual = abs(comb.imag - printed)
    ratio = comb.imag / printed if printed != 0.0 else float("nan")
    return ReductionReport(bracket, comb, printed, residual, ratio)
