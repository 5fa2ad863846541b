"""On-disk cache location, atomic writes, and the zero-table cache."""
from __future__ import annotations

import fcntl
import json
import os
import tempfile
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Callable

from .errors import CacheError

CACHE_ENV = "H8_CACHE_DIR"
DEFAULT_CACHE_DIR = ".h8cache"
ZERO_META_VERSION = 1

_override: Path | None = None


def set_cache_dir(path) -> None:
    """Process-wide override (None restores the environment/default lookup)."""
    global _override
    _override = None if path is None else Path(path)


def cache_dir() -> Path:
    if _override is not None:
        return _override
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE_DIR))


def caching_enabled() -> bool:
    """Large artifacts (the sieve) persist only when a cache dir was configured."""
    return _override is not None or CACHE_ENV in os.environ


def atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_thread_locks: dict[str, threading.Lock] = {}
_thread_locks_guard = threading.Lock()


@contextmanager
def exclusive(path: Path):
    """Exclusive lock on ``path`` across threads and processes."""
    key = str(path.resolve())
    with _thread_locks_guard:
        tl = _thread_locks.setdefault(key, threading.Lock())
    with tl:
        path.parent.mkdir(parents=True, exist_ok=True)
        lock_path = path.with_name(path.name + ".lock")
        with open(lock_path, "a") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)


def _zero_dir(root: Path | None) -> Path:
    return (root or cache_dir()) / "zeros"


def zero_table_paths(source: str, root: Path | None = None) -> tuple[Path, Path]:
    stem = source.replace(":", "_")
    d = _zero_dir(root)
    return d / f"{stem}.csv", d / f"{stem}.meta.json"


def read_zero_meta(source: str, root: Path | None = None) -> dict | None:
    _, meta_path = zero_table_paths(source, root)
    if not meta_path.exists():
        return None
    try:
        meta = json.loads(meta_path.read_text())
    except (OSError, ValueError) as exc:
        raise CacheError(f"{meta_path}: unreadable zero-table metadata ({exc})") from exc
    if meta.get("version") != ZERO_META_VERSION or meta.get("source") != source:
        raise CacheError(f"{meta_path}: version or source mismatch")
    return meta


def cached_zeros(source: str, height: float, compute: Callable[[float], list], root: Path | None = None,
                 allow_compute: bool = True) -> list:
    """Zero records for ``source`` with gamma_height <= height.

    Tables are written once per source by an exclusive writer; readers
    that find the table short wait on the same lock and then reuse it.
    ``compute(height)`` must return records for (0, height].
    """
    from .zeta_engine import read_zero_table, write_zero_table
    from .errors import MissingZeroTableError

    csv_path, meta_path = zero_table_paths(source, root)

    def covered() -> bool:
        meta = read_zero_meta(source, root)
        return meta is not None and meta["height"] >= height and csv_path.exists()

    if not covered():
        if not allow_compute:
            raise MissingZeroTableError(f"no cached zeros for {source} up to height {height:g}")
        with exclusive(csv_path):
            if not covered():
                records = compute(height)
                tmp = csv_path.with_name(csv_path.name + ".new")
                csv_path.parent.mkdir(parents=True, exist_ok=True)
                write_zero_table(records, tmp)
                os.replace(tmp, csv_path)
                meta = {"source": source, "height": float(height), "version": ZERO_META_VERSION,
                        "count": len(records)}
                atomic_write_bytes(meta_path, json.dumps(meta, sort_keys=True).encode())
    try:
        records = read_zero_table(csv_path)
    except (OSError, ValueError) as exc:
        raise CacheError(f"{csv_path}: corrupt zero table ({exc})") from exc
    return [r for r in records if r.gamma_height <= height]
