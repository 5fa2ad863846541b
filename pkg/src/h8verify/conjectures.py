"""Brute-force Goldbach and twin-prime weighted counts against the claimed
main-term lower bound 4(2 log 2 - log 3) C(N) N / log N."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .errors import OddNError, RangeTooLargeError
from .prime_tables import primes_upto
from .sieve_kit import singular_series_C

GOLDBACH_CONSTANT = 4.0 * (2.0 * math.log(2.0) - math.log(3.0))
COUNT_LIMIT = 10**8


class Mode(str, Enum):
    GOLDBACH = "GOLDBACH"
    TWIN = "TWIN"


@dataclass(frozen=True)
class BoundComparison:
    N: int
    mode: Mode
    lhs_count: int
    lhs_weighted: float
    rhs_bound: float
    ratio: float

    @property
    def passed(self) -> bool:
        return self.lhs_count > 0 and self.ratio > 1.0

    def as_row(self) -> list:
        return [self.N, self.mode.value, self.lhs_count, f"{self.lhs_weighted:.12g}",
                f"{self.rhs_bound:.12g}", f"{self.ratio:.12g}", "PASS" if self.passed else "FAIL"]


def _check_even(N: int) -> None:
    if N % 2:
        raise OddNError(f"N = {N} is odd")


def goldbach_weighted(N: int) -> tuple[int, float]:
    """(#{2 < p < N : N - p prime}, sum of log p over them), ordered."""
    _check_even(N)
    if N > COUNT_LIMIT:
        raise RangeTooLargeError(f"N must be <= {COUNT_LIMIT:.0e}")
    if N < 6:
        return 0, 0.0
    p = primes_upto(N - 3)
    p = p[p > 2]
    partner = N - p
    idx = np.searchsorted(p, partner)
    hit = (idx < len(p)) & (p[np.minimum(idx, len(p) - 1)] == partner)
    return int(np.count_nonzero(hit)), math.fsum(np.log(p[hit].astype(float)))


def goldbach_counts(n_max: int) -> np.ndarray:
    """r[N] = #{odd primes p : N - p odd prime} for all N <= n_max (FFT convolution)."""
    if n_max > 10**7:
        raise RangeTooLargeError("range convolution supported up to 1e7")
    ind = np.zeros(n_max + 1)
    p = primes_upto(n_max)
    ind[p[p > 2]] = 1.0
    return np.rint(_convolve_self(ind, ind, n_max)).astype(np.int64)


def _convolve_self(a: np.ndarray, b: np.ndarray, n_max: int) -> np.ndarray:
    size = 1 << int(math.ceil(math.log2(2 * n_max + 2)))
    return np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)[: n_max + 1]


def goldbach_range(n_min: int, n_max: int) -> list[BoundComparison]:
    """bound_comparison(N, GOLDBACH) for every even N in [max(6, n_min), n_max],
    counts and weights by FFT convolution (weights to ~1e-10 relative)."""
    if n_max > 10**7:
        raise RangeTooLargeError("range convolution supported up to 1e7")
    lo = max(6, n_min + (n_min % 2))
    if n_max < lo:
        return []
    ind = np.zeros(n_max + 1)
    w = np.zeros(n_max + 1)
    p = primes_upto(n_max)
    p = p[p > 2]
    ind[p] = 1.0
    w[p] = np.log(p.astype(float))
    counts = np.rint(_convolve_self(ind, ind, n_max)).astype(np.int64)
    weights = _convolve_self(w, ind, n_max)
    rows = []
    for N in range(lo, n_max + 1, 2):
        c = int(counts[N])
        lw = float(weights[N]) if c else 0.0
        rhs = goldbach_rhs(N)
        rows.append(BoundComparison(N, Mode.GOLDBACH, c, lw, rhs, lw / rhs if c else 0.0))
    return rows


def goldbach_rhs(N: int) -> float:
    """4 (2 log 2 - log 3) C(N) N / log N."""
    if N < 4:
        raise ValueError("N must be >= 4")
    return GOLDBACH_CONSTANT * singular_series_C(N) * N / math.log(N)


def twin_weighted(N: int) -> tuple[int, float]:
    """(#{p <= N : p - 2 prime}, sum of log p over them), anchored at the larger member."""
    if N > COUNT_LIMIT:
        raise RangeTooLargeError(f"N must be <= {COUNT_LIMIT:.0e}")
    p = primes_upto(N)
    larger = p[1:][np.diff(p) == 2]
    return len(larger), math.fsum(np.log(larger.astype(float)))


def bound_comparison(N: int, mode) -> BoundComparison:
    """Both modes use the Goldbach right-hand side, C(N) taken at the counting limit."""
    mode = Mode(mode)
    if mode is Mode.GOLDBACH:
        count, weighted = goldbach_weighted(N)
    else:
        count, weighted = twin_weighted(N)
    rhs = goldbach_rhs(N if N % 2 == 0 else N + 1) if mode is Mode.TWIN else goldbach_rhs(N)
    ratio = weighted / rhs if count > 0 else 0.0
    return BoundComparison(N, mode, count, weighted, rhs, ratio)


BOUND_CSV_FIELDS = ("N", "mode", "lhs_count", "lhs_weighted", "rhs_bound", "ratio", "pass")


def write_bound_csv(rows: Iterable[BoundComparison], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BOUND_CSV_FIELDS)
        for r in rows:
            w.writerow(r.as_row())
