"""WARM / VERIFY / CLEAR for the sieve file and the zero tables."""
from __future__ import annotations

import csv
import math
import shutil
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .. import cache as _cache
from .. import dirichlet_l, prime_tables, zeta_engine
from ..errors import CacheError

VERIFY_SAMPLES = 1000


class Action(str, Enum):
    WARM = "WARM"
    VERIFY = "VERIFY"
    CLEAR = "CLEAR"


class Scope(str, Enum):
    SIEVE = "SIEVE"
    ZEROS = "ZEROS"
    ALL = "ALL"


@dataclass
class CacheStatus:
    action: Action
    scope: Scope
    files: list[str] = field(default_factory=list)
    corrupt: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.corrupt


def _is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _warm_sources(l_height: float) -> list:
    """Real primitive characters the suite scans, q <= 12."""
    chars = []
    for q in range(3, 13):
        chars.extend(dirichlet_l.quadratic_primitive_characters(q))
    return chars


def verify_sieve(path: Path, seed: int, samples: int = VERIFY_SAMPLES) -> None:
    table = prime_tables.read_sieve_file(path)
    rng = np.random.default_rng(seed)
    for n in rng.integers(table.lo, table.hi + 1, samples):
        n = int(n)
        if table.is_prime(n) != _is_prime_trial(n):
            raise CacheError(f"{path}: primality bit wrong at {n}")


def verify_zero_table(csv_path: Path) -> None:
    source = None
    try:
        with csv_path.open(newline="") as fh:
            header = next(csv.reader(fh))
        if tuple(header) != zeta_engine.ZERO_CSV_FIELDS:
            raise CacheError(f"{csv_path}: bad header")
        records = zeta_engine.read_zero_table(csv_path)
    except (OSError, ValueError, StopIteration, KeyError, TypeError) as exc:
        raise CacheError(f"{csv_path}: unreadable ({exc})") from exc
    if records:
        source = records[0].source
        meta = _cache.read_zero_meta(source, csv_path.parent.parent)
        if meta is None:
            raise CacheError(f"{csv_path}: missing metadata")
        if meta.get("count") != len(records):
            raise CacheError(f"{csv_path}: holds {len(records)} rows, metadata says {meta.get('count')}")
    heights = [r.gamma_height for r in records]
    if any(b <= a for a, b in zip(heights, heights[1:])):
        raise CacheError(f"{csv_path}: heights not strictly increasing")
    if any(r.residual_abs > zeta_engine.DEFAULT_ZERO_TOL for r in records):
        raise CacheError(f"{csv_path}: residual above tolerance")


def cache_admin(action, scope="ALL", root=None, sieve_hi: int = 10**8, zeta_height: float = 150.0,
                l_height: float = 200.0, seed: int = 0) -> CacheStatus:
    action, scope = Action(str(action).upper()), Scope(str(scope).upper())
    root = Path(root) if root is not None else _cache.cache_dir()
    status = CacheStatus(action, scope)
    sieve_path = root / prime_tables.SIEVE_FILE
    zero_dir = root / "zeros"
    do_sieve = scope in (Scope.SIEVE, Scope.ALL)
    do_zeros = scope in (Scope.ZEROS, Scope.ALL)

    if action is Action.CLEAR:
        if do_sieve and sieve_path.exists():
            sieve_path.unlink()
            status.files.append(str(sieve_path))
            prime_tables.PRIME_STORE.reset()
        if do_zeros and zero_dir.exists():
            status.files.extend(sorted(str(p) for p in zero_dir.iterdir()))
            shutil.rmtree(zero_dir)
        return status

    if action is Action.WARM:
        if do_sieve:
            table = prime_tables.build_sieve(2, int(sieve_hi))
            prime_tables.write_sieve_file(table, sieve_path)
            status.files.append(str(sieve_path))
        if do_zeros:
            _cache.cached_zeros(zeta_engine.ZETA_SOURCE, zeta_height,
                                lambda h: zeta_engine.find_zeta_zeros(0.0, h), root)
            for chi in _warm_sources(l_height):
                dirichlet_l.cached_l_zeros(chi, min(l_height, 200.0), root)
            status.files.extend(sorted(str(p) for p in zero_dir.glob("*.csv")))
        return status

    # VERIFY
    if do_sieve:
        if sieve_path.exists():
            status.files.append(str(sieve_path))
            try:
                verify_sieve(sieve_path, seed)
            except CacheError as exc:
                status.corrupt.append(str(exc))
    if do_zeros and zero_dir.exists():
        for csv_path in sorted(zero_dir.glob("*.csv")):
            status.files.append(str(csv_path))
            try:
                verify_zero_table(csv_path)
            except CacheError as exc:
                status.corrupt.append(str(exc))
    return status
