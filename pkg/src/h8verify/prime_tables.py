"""Segmented odd-only sieve plus the Chebyshev-type sums built on it.

Conventions
-----------
theta_paper(x; q, l) sums log p over primes 2 < p <= x; the classical
theta(x) includes p = 2.  AP and scaled variants default to the former,
plain theta(x) (q = 1, b = 1) to the latter.
"""
from __future__ import annotations

import math
import struct
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from . import cache as _cache
from .errors import CacheError, NonCoprimeError, RangeTooLargeError, WorkBoundError

SIEVE_LIMIT = 10**9
SEGMENT_ODDS = 1 << 22
SIEVE_MAGIC = b"H8SV"
SIEVE_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")
SIEVE_FILE = "sieve.bin"


# -- sieve ---------------------------------------------------------------------

def _small_primes(n: int) -> np.ndarray:
    """Plain sieve of Eratosthenes, primes <= n."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _odd_segment(first: int, count: int, base: np.ndarray) -> np.ndarray:
    """Primality flags of the odd numbers first, first+2, ..., first+2(count-1)."""
    flags = np.ones(count, dtype=bool)
    last = first + 2 * (count - 1)
    for p in base[base > 2]:
        p = int(p)
        if p * p > last:
            break
        start = max(p * p, -(-first // p) * p)
        if start % 2 == 0:
            start += p
        if start > last:
            continue
        flags[(start - first) // 2::p] = False
    if first == 1:
        flags[0] = False
    return flags


@dataclass
class PrimeTable:
    """Primality of [lo, hi]; ``bits`` packs the odd numbers from lo|1 upward
    into little-endian uint64 words (bit j of the stream = first_odd + 2j)."""

    lo: int
    hi: int
    bits: np.ndarray
    count: int

    @property
    def first_odd(self) -> int:
        return self.lo | 1

    @property
    def n_odd(self) -> int:
        return 0 if self.hi < self.first_odd else (self.hi - self.first_odd) // 2 + 1

    def flags(self) -> np.ndarray:
        raw = np.unpackbits(self.bits.view(np.uint8), bitorder="little")
        return raw[: self.n_odd].astype(bool)

    def primes(self) -> np.ndarray:
        odd = self.first_odd + 2 * np.flatnonzero(self.flags()).astype(np.int64)
        if self.lo <= 2 <= self.hi:
            return np.concatenate([np.array([2], dtype=np.int64), odd])
        return odd

    def is_prime(self, n: int) -> bool:
        if not self.lo <= n <= self.hi:
            raise ValueError(f"{n} outside [{self.lo}, {self.hi}]")
        if n == 2:
            return True
        if n % 2 == 0:
            return False
        j = (n - self.first_odd) // 2
        return bool((int(self.bits[j >> 6]) >> (j & 63)) & 1)


def build_sieve(lo: int, hi: int) -> PrimeTable:
    """Segmented sieve of [lo, hi]; working memory is one 4 MiB segment."""
    lo, hi = int(lo), int(hi)
    if hi > SIEVE_LIMIT:
        raise RangeTooLargeError(f"sieve limit is {SIEVE_LIMIT:.0e}")
    if lo < 2 or hi < lo:
        raise ValueError("need 2 <= lo <= hi")
    base = _small_primes(math.isqrt(hi))
    first = lo | 1
    n_odd = 0 if hi < first else (hi - first) // 2 + 1
    words = np.zeros((n_odd + 63) // 64, dtype="<u8")
    byte_view = words.view(np.uint8)
    count = 1 if lo <= 2 <= hi else 0
    # segments are multiples of 64 odds so each lands on whole words
    for start in range(0, n_odd, SEGMENT_ODDS):
        size = min(SEGMENT_ODDS, n_odd - start)
        seg = _odd_segment(first + 2 * start, size, base)
        count += int(np.count_nonzero(seg))
        packed = np.packbits(seg, bitorder="little")
        byte_view[start // 8: start // 8 + len(packed)] = packed
    return PrimeTable(lo, hi, words, count)


def write_sieve_file(table: PrimeTable, path: Path) -> None:
    header = _HEADER.pack(SIEVE_MAGIC, SIEVE_VERSION, table.lo, table.hi)
    _cache.atomic_write_bytes(Path(path), header + table.bits.astype("<u8").tobytes())


def read_sieve_file(path: Path) -> PrimeTable:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CacheError(f"{path}: {exc}") from exc
    if len(data) < _HEADER.size:
        raise CacheError(f"{path}: truncated header")
    magic, version, lo, hi = _HEADER.unpack_from(data)
    if magic != SIEVE_MAGIC:
        raise CacheError(f"{path}: bad magic {magic!r}")
    if version != SIEVE_VERSION:
        raise CacheError(f"{path}: unsupported version {version}")
    first = lo | 1
    n_odd = 0 if hi < first else (hi - first) // 2 + 1
    n_words = (n_odd + 63) // 64
    body = data[_HEADER.size:]
    if len(body) != 8 * n_words:
        raise CacheError(f"{path}: expected {8 * n_words} payload bytes, found {len(body)}")
    words = np.frombuffer(body, dtype="<u8").copy()
    table = PrimeTable(lo, hi, words, 0)
    table.count = int(np.count_nonzero(table.flags())) + (1 if lo <= 2 <= hi else 0)
    return table


class _PrimeStore:
    """Process-wide primes <= limit, grown on demand (and persisted when a
    cache directory is configured)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._primes = np.zeros(0, dtype=np.int64)
        self._limit = 1

    def primes_upto(self, n: int) -> np.ndarray:
        n = int(n)
        if n > SIEVE_LIMIT:
            raise RangeTooLargeError(f"sieve limit is {SIEVE_LIMIT:.0e}")
        with self._lock:
            if n > self._limit:
                self._grow(max(n, min(SIEVE_LIMIT, 2 * self._limit)))
            primes = self._primes
        return primes[: np.searchsorted(primes, n, side="right")]

    def _grow(self, n: int) -> None:
        table = None
        path = _cache.cache_dir() / SIEVE_FILE if _cache.caching_enabled() else None
        if path is not None and path.exists():
            try:
                cached = read_sieve_file(path)
                if cached.lo == 2 and cached.hi >= n:
                    table = cached
            except CacheError:
                table = None
        if table is None:
            table = build_sieve(2, max(n, 2))
            if path is not None:
                write_sieve_file(table, path)
        self._primes = table.primes()
        self._limit = table.hi

    def reset(self) -> None:
        with self._lock:
            self._primes = np.zeros(0, dtype=np.int64)
            self._limit = 1


PRIME_STORE = _PrimeStore()


def primes_upto(n: int) -> np.ndarray:
    return PRIME_STORE.primes_upto(n)


def prime_powers_upto(n: int, min_exponent: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(n_values, log p) for all p^k <= n with k >= min_exponent, sorted by n_value."""
    n = int(n)
    primes = primes_upto(n)
    vals, logs = [], []
    power = primes.copy()
    k = 1
    while len(power):
        if k >= min_exponent:
            vals.append(power)
            logs.append(np.log(primes[: len(power)].astype(float)))
        k += 1
        keep = power <= n // primes[: len(power)]
        power = power[keep] * primes[: len(power)][keep]
    if not vals:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    v = np.concatenate(vals)
    lg = np.concatenate(logs)
    order = np.argsort(v, kind="stable")
    return v[order], lg[order]


# -- Chebyshev sums ------------------------------------------------------------------

class Kind(str, Enum):
    PSI = "PSI"
    THETA = "THETA"


def _floor(x: float) -> int:
    return int(math.floor(x))


def _check_coprime(q: int, l: int, b: int) -> None:
    if q < 1:
        raise ValueError("q must be positive")
    if q > 1 and math.gcd(l, q) != 1:
        raise NonCoprimeError(f"gcd({l}, {q}) != 1")
    if q > 1 and b > 1 and math.gcd(b, q) != 1:
        raise NonCoprimeError(f"gcd({b}, {q}) != 1")


def _terms(limit: int, kind: Kind, paper_theta: bool) -> tuple[np.ndarray, np.ndarray]:
    if kind is Kind.PSI:
        return prime_powers_upto(limit)
    p = primes_upto(limit)
    if paper_theta:
        p = p[p > 2]
    return p, np.log(p.astype(float))


def chebyshev_sum(x: float, kind: Union[Kind, str] = Kind.PSI, q: int = 1, l: int = 0, b: int = 1,
                  theta_convention: str | None = None) -> float:
    """Sum of Lambda(n) (PSI) or log p (THETA) over n <= x/b with b n = l (mod q).

    ``theta_convention`` is "paper" (2 < p) or "classical"; by default
    classical for plain theta(x) and paper for AP or scaled variants.
    """
    kind = Kind(kind)
    if b < 1:
        raise ValueError("b must be >= 1")
    if x * 1.0 / b > SIEVE_LIMIT:
        raise RangeTooLargeError("x/b exceeds the sieve limit")
    _check_coprime(q, l, b)
    if theta_convention is None:
        theta_convention = "classical" if (q == 1 and b == 1) else "paper"
    if theta_convention not in ("paper", "classical"):
        raise ValueError(f"unknown theta convention {theta_convention!r}")
    limit = _floor(x / b) if not float(x).is_integer() else int(x) // b
    if limit < 2:
        return 0.0
    n, lg = _terms(limit, kind, theta_convention == "paper")
    if q > 1:
        lg = lg[(b * n) % q == l % q]
    return float(math.fsum(lg))


def psi(x: float) -> float:
    return chebyshev_sum(x, Kind.PSI)


def theta(x: float, convention: str = "classical") -> float:
    return chebyshev_sum(x, Kind.THETA, theta_convention=convention)


def class_sums(x: float, q: int, kind: Union[Kind, str] = Kind.PSI, theta_convention: str = "paper") -> np.ndarray:
    """psi(x; q, l) (or theta) for every residue l in [0, q), one pass."""
    kind = Kind(kind)
    limit = _floor(x)
    if limit < 2:
        return np.zeros(q)
    n, lg = _terms(limit, kind, theta_convention == "paper")
    return np.bincount(n % q, weights=lg, minlength=q)


def psi_chi(x: float, chi) -> complex:
    """psi(x, chi) = sum_{n <= x} Lambda(n) chi(n), for any object with
    ``modulus`` and a ``values`` table indexed by n mod q."""
    if x > 1e8:
        raise RangeTooLargeError("psi_chi supported for x <= 1e8")
    limit = _floor(x)
    if limit < 2:
        return 0j
    n, lg = prime_powers_upto(limit)
    vals = np.asarray(chi.values)[n % chi.modulus]
    return complex(np.sum(lg * vals))


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@dataclass(frozen=True)
class ErrorSample:
    x: float
    q: int
    l: int
    b: int
    psi_value: float
    main_term: float
    error: float

    def as_row(self) -> list:
        return [self.x, self.q, self.l, self.b, self.psi_value, self.main_term, self.error]


ERROR_CSV_FIELDS = ("x", "q", "l", "b", "psi", "main", "error")


def error_term(x: float, q: int, l: int, b: int = 1) -> ErrorSample:
    """E(x; q, l) = psi(x; q, l) - x/phi(q); scaled: psi(x; b, q, l) - (x/b)/phi(q)."""
    if q > 1 and not 1 <= l < q:
        raise ValueError("need 1 <= l < q")
    value = chebyshev_sum(x, Kind.PSI, q, l, b)
    main = (x / b) / euler_phi(q)
    return ErrorSample(float(x), q, l, b, value, main, value - main)


def max_normalized_error(x: float, q_max: int) -> tuple[float, int, int]:
    """max over 2 <= q <= q_max, coprime l, of |E(x;q,l)| / (sqrt(x) log^2 x),
    with the maximizing (q, l)."""
    scale = math.sqrt(x) * math.log(x) ** 2
    n, lg = prime_powers_upto(_floor(x))
    best = (0.0, 0, 0)
    for q in range(2, q_max + 1):
        sums = np.bincount(n % q, weights=lg, minlength=q)
        units = np.array([l for l in range(1, q) if math.gcd(l, q) == 1])
        err = np.abs(sums[units] - x / len(units)) / scale
        k = int(np.argmax(err))
        if err[k] > best[0]:
            best = (float(err[k]), q, int(units[k]))
    return best


@dataclass(frozen=True)
class FixedL:
    l: int


MAX_L = "MAX_L"
LMode = Union[FixedL, str]


def averaged_error_sum(x: float, D: int, mode: LMode = MAX_L) -> float:
    """sum_{2 <= q <= D} |E(x; q, l)|: FixedL(l) skips q with gcd(q, l) > 1,
    MAX_L takes the largest |E| over coprime residues for each q."""
    if D > 10**4:
        raise RangeTooLargeError("D must be <= 1e4")
    if x > 1e8:
        raise RangeTooLargeError("x must be <= 1e8")
    if D < 2:
        return 0.0
    if not (isinstance(mode, FixedL) or mode == MAX_L):
        raise ValueError(f"unknown mode {mode!r}")
    n, lg = prime_powers_upto(_floor(x))
    total = []
    for q in range(2, D + 1):
        sums = np.bincount(n % q, weights=lg, minlength=q)
        if isinstance(mode, FixedL):
            l = mode.l % q
            if math.gcd(l, q) != 1:
                continue
            total.append(abs(sums[l] - x / euler_phi(q)))
        else:
            units = [l for l in range(1, q) if math.gcd(l, q) == 1]
            total.append(float(np.max(np.abs(sums[units] - x / len(units)))))
    return math.fsum(total)


SCALED_WORK_BOUND = 10**7


def scaled_error_sum(x: float, D: int, b_max: int, l: int = 1) -> float:
    """sum_{2 <= q <= D} sum_{1 <= b <= b_max, gcd(b,q)=1} |E(x; b, q, l)|.

    psi(x; b, q, l) counts n <= x/b with b n = l (mod q), i.e.
    n = l b^{-1} (mod q).
    """
    if b_max > math.isqrt(_floor(x)):
        raise ValueError("b_max must be <= sqrt(x)")
    if D * b_max > SCALED_WORK_BOUND:
        raise WorkBoundError(f"D * b_max = {D * b_max} exceeds {SCALED_WORK_BOUND}")
    if D < 2 or b_max < 1:
        return 0.0
    n, lg = prime_powers_upto(_floor(x))
    total = []
    for q in range(2, D + 1):
        if math.gcd(l, q) != 1:
            continue
        phi = euler_phi(q)
        residues = n % q
        # per class: cumulative Lambda along the sorted prime powers
        class_n, class_cum = {}, {}
        for c in range(q):
            sel = residues == c
            class_n[c] = n[sel]
            class_cum[c] = np.concatenate([[0.0], np.cumsum(lg[sel])])
        for b in range(1, b_max + 1):
            if math.gcd(b, q) != 1:
                continue
            c = (l * pow(b, -1, q)) % q
            lim = int(x) // b if float(x).is_integer() else _floor(x / b)
            k = int(np.searchsorted(class_n[c], lim, side="right"))
            total.append(abs(class_cum[c][k] - (x / b) / phi))
    return math.fsum(total)


@dataclass(frozen=True)
class Lemma6Gap:
    psi_dev: float
    theta_dev: float
    gap: float


def lemma6_gap(x: float, q: int = 1, l: int = 0) -> Lemma6Gap:
    """|psi(x;q,l) - x/phi(q)|, |theta_paper(x;q,l) - x/phi(q)| and |psi - theta_paper|.

    The gap is accumulated directly from the terms psi has and theta lacks
    (p = 2 and the higher prime powers), so it is not a difference of two
    large sums.
    """
    _check_coprime(q, l, 1)
    limit = _floor(x)
    main = x / euler_phi(q)
    if limit < 2:
        return Lemma6Gap(main, main, 0.0)
    psi_value = chebyshev_sum(x, Kind.PSI, q, l)
    theta_value = chebyshev_sum(x, Kind.THETA, q, l, theta_convention="paper")
    n, lg = prime_powers_upto(limit, min_exponent=2)
    extra = [math.log(2.0)] if (q == 1 or 2 % q == l % q) else []
    sel = lg if q == 1 else lg[n % q == l % q]
    gap = math.fsum(list(sel) + extra)
    return Lemma6Gap(abs(psi_value - main), abs(theta_value - main), gap)


def mertens_segment(x: float) -> float:
    """sum of 1/p over primes with x^{1/3} <= p <= x^{1/2} (integer-exact bounds)."""
    if x > SIEVE_LIMIT:
        raise RangeTooLargeError("x must be <= 1e9")
    top = math.isqrt(_floor(x))
    p = primes_upto(top)
    # p <= sqrt(1e9), so p^3 fits comfortably in int64
    if float(x).is_integer():
        p = p[p ** 3 >= int(x)]
    else:
        p = p[p.astype(float) ** 3 >= x]
    return math.fsum(1.0 / p.astype(float))


def lemma6_gap_table(xs: Sequence[float], q: int = 1) -> dict[tuple[float, int], Lemma6Gap]:
    """lemma6_gap for every x in ``xs`` and every coprime residue l mod q,
    from a single pass over the prime powers <= max(xs)."""
    xs = sorted(float(x) for x in xs)
    limit = _floor(xs[-1])
    n, lg = prime_powers_upto(max(limit, 2))
    is_odd_prime = np.zeros(len(n), dtype=bool)
    primes = primes_upto(max(limit, 2))
    is_odd_prime[np.searchsorted(n, primes[primes > 2])] = True
    residue = n % q
    units = [0] if q == 1 else [l for l in range(1, q) if math.gcd(l, q) == 1]
    phi = euler_phi(q)
    theta_acc = np.zeros(q)
    extra_acc = np.zeros(q)
    start = 0
    out = {}
    for x in xs:
        stop = int(np.searchsorted(n, _floor(x), side="right"))
        seg = slice(start, stop)
        odd = is_odd_prime[seg]
        theta_acc += np.bincount(residue[seg][odd], weights=lg[seg][odd], minlength=q)
        extra_acc += np.bincount(residue[seg][~odd], weights=lg[seg][~odd], minlength=q)
        start = stop
        main = x / phi
        for l in units:
            th = float(theta_acc[l])
            ex = float(extra_acc[l])
            out[(x, l)] = Lemma6Gap(abs(th + ex - main), abs(th - main), ex)
    return out
