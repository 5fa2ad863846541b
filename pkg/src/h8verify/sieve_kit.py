"""Singular series, Rosser's linear-sieve functions, the brute-force
weighted sieve, and the linear-sieve sandwich with its exact remainder."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import exp1

from .errors import OddNError, SieveRangeError, WorkBoundError
from .prime_tables import primes_upto
from .special_functions import EULER_GAMMA

TWIN_PRODUCT_LIMIT = 10**7
SANDWICH_SLACK = 0.15
REMAINDER_WORK_BOUND = 10**7
BRUTE_LIMIT = 10**7


class ShiftMode(str, Enum):
    GOLDBACH = "GOLDBACH"   # a = N - p
    TWIN = "TWIN"           # a = p + 2


@lru_cache(maxsize=None)
def twin_prime_constant() -> float:
    """prod_{p > 2} (1 - 1/(p-1)^2).

    Exact product over 2 < p <= 1e7; the tail is exp(-sum_{p>P} 1/(p-1)^2)
    with the sum estimated by int_P^inf dt/(t^2 log t) = E1(log P), about
    6e-9, whose own error is far below 1e-9.
    """
    p = primes_upto(TWIN_PRODUCT_LIMIT)[1:].astype(float)
    log_prod = math.fsum(np.log1p(-1.0 / (p - 1.0) ** 2))
    tail = float(exp1(math.log(TWIN_PRODUCT_LIMIT)))
    return math.exp(log_prod - tail)


def odd_prime_divisors(n: int) -> list[int]:
    out, m, p = [], n, 3
    while m % 2 == 0:
        m //= 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 2
    if m > 1:
        out.append(m)
    return out


def singular_factor(N: int) -> Fraction:
    """prod_{2 < p | N} (p - 1)/(p - 2), exact."""
    f = Fraction(1)
    for p in odd_prime_divisors(N):
        f *= Fraction(p - 1, p - 2)
    return f


def singular_series_C(N: int) -> float:
    if N % 2:
        raise OddNError("C(N) is defined for even N")
    if N < 4:
        raise ValueError("N must be >= 4")
    return float(singular_factor(N)) * twin_prime_constant()


# -- Rosser functions -------------------------------------------------------------

def rosser_f(u: float) -> float:
    """f(u) = 2 e^gamma log(u - 1) / u on [2, 4]."""
    if not 2.0 <= u <= 4.0:
        raise SieveRangeError("f(u) is given for 2 <= u <= 4")
    return 2.0 * math.exp(EULER_GAMMA) * math.log(u - 1.0) / u


def rosser_F(u: float) -> float:
    """F(u) = 2 e^gamma / u on [2, 3]."""
    if not 2.0 <= u <= 3.0:
        raise SieveRangeError("F(u) is given for 2 <= u <= 3")
    return 2.0 * math.exp(EULER_GAMMA) / u


# -- contexts and the brute-force sieve ------------------------------------------------

@dataclass(frozen=True)
class SieveContext:
    N: int
    shift_mode: ShiftMode
    z: float
    y: float
    u: float

    def __post_init__(self):
        mode = ShiftMode(self.shift_mode)
        object.__setattr__(self, "shift_mode", mode)
        if self.N < 6:
            raise SieveRangeError("N must be >= 6")
        if mode is ShiftMode.GOLDBACH and self.N % 2:
            raise OddNError("GOLDBACH mode needs even N")
        if not 2.0 <= self.z <= math.sqrt(self.N) * (1 + 1e-12):
            raise SieveRangeError("need 2 <= z <= sqrt(N)")
        if abs(math.log(self.y) / math.log(self.z) - self.u) > 1e-12:
            raise ValueError("u must equal log y / log z")

    @classmethod
    def from_u(cls, N: int, mode, u: float, z: float | None = None) -> "SieveContext":
        """z defaults to N^{1/3}; y = z^u."""
        z = N ** (1.0 / 3.0) if z is None else z
        y = z ** u
        return cls(N, ShiftMode(mode), z, y, math.log(y) / math.log(z))

    def shifted(self, p: np.ndarray) -> np.ndarray:
        return self.N - p if self.shift_mode is ShiftMode.GOLDBACH else p + 2

    def target_residue(self, d: int) -> int:
        """p mod d for which d divides the shifted element."""
        return self.N % d if self.shift_mode is ShiftMode.GOLDBACH else (-2) % d


def brute_weighted_sieve(ctx: SieveContext, z: float | None = None) -> float:
    """S(A, z): sum of log p over 2 < p <= N whose shifted element has no
    prime factor <= z (z defaults to ctx.z)."""
    if ctx.N > BRUTE_LIMIT:
        raise SieveRangeError(f"N must be <= {BRUTE_LIMIT:.0e}")
    z = ctx.z if z is None else z
    p = primes_upto(ctx.N)
    p = p[p > 2]
    a = ctx.shifted(p)
    keep = np.ones(len(p), dtype=bool)
    for r in primes_upto(int(math.floor(z + 1e-9))):
        keep &= (a % r) != 0
    return math.fsum(np.log(p[keep].astype(float)))


# -- sandwich ------------------------------------------------------------------------------

def squarefree_products(primes: list[int], limit: float) -> list[int]:
    """All squarefree d <= limit built from ``primes`` (including d = 1), depth first."""
    out = [1]
    work = 0

    def extend(start: int, d: int) -> None:
        nonlocal work
        for i in range(start, len(primes)):
            nd = d * primes[i]
            if nd > limit:
                break
            work += 1
            if work > REMAINDER_WORK_BOUND:
                raise WorkBoundError("too many squarefree moduli in the remainder sum")
            out.append(nd)
            extend(i + 1, nd)

    extend(0, 1)
    return sorted(out)


def _phi_squarefree(d: int, primes: list[int]) -> int:
    phi = 1
    for p in primes:
        if d % p == 0:
            phi *= p - 1
    return phi


@dataclass(frozen=True)
class SandwichResult:
    lower: float
    upper: float
    remainder: float
    lower_main: float
    upper_main: float
    n_moduli: int


def sieve_remainder(ctx: SieveContext) -> tuple[float, int]:
    """sum over squarefree d <= y with prime factors in (2, z] of
    |theta(N; d, l_d) - N g(d)|, g(d) = 1/phi(d) when gcd(l_d, d) = 1 and 0
    otherwise (such classes hold at most one prime)."""
    sift = [int(p) for p in primes_upto(int(math.floor(ctx.z + 1e-9))) if p > 2]
    moduli = squarefree_products(sift, ctx.y)
    p = primes_upto(ctx.N)
    p = p[p > 2]
    logs = np.log(p.astype(float))
    terms = []
    for d in moduli:
        l_d = ctx.target_residue(d)
        theta = float(np.sum(logs[p % d == l_d])) if d > 1 else float(np.sum(logs))
        density = 1.0 / _phi_squarefree(d, sift) if math.gcd(l_d, d) == 1 else 0.0
        terms.append(abs(theta - ctx.N * density))
    return math.fsum(terms), len(moduli)


def main_terms(ctx: SieveContext) -> tuple[float, float]:
    """2 e^{-gamma} C(N) f(u) N / log z and the same with F(u)."""
    base = 2.0 * math.exp(-EULER_GAMMA) * singular_series_C(ctx.N if ctx.N % 2 == 0 else ctx.N + 1) * ctx.N / math.log(ctx.z)
    return base * rosser_f(ctx.u), base * rosser_F(ctx.u)


def rosser_sandwich(ctx: SieveContext) -> SandwichResult:
    if not 2.0 <= ctx.u <= 3.0:
        raise SieveRangeError("sandwich needs 2 <= u <= 3")
    lo_main, hi_main = main_terms(ctx)
    remainder, n = sieve_remainder(ctx)
    return SandwichResult(lo_main - remainder, hi_main + remainder, remainder, lo_main, hi_main, n)


def sandwich_holds(ctx: SieveContext, slack: float = SANDWICH_SLACK) -> tuple[bool, SandwichResult, float]:
    """lower - slack*lower_main <= S <= upper + slack*upper_main."""
    res = rosser_sandwich(ctx)
    s = brute_weighted_sieve(ctx)
    ok = res.lower - slack * res.lower_main <= s <= res.upper + slack * res.upper_main
    return ok, res, s


SANDWICH_CSV_FIELDS = ("N", "mode", "z", "y", "u", "lower", "S", "upper", "remainder")
