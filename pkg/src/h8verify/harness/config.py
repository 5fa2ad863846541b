"""RunConfig: JSON-backed run settings with strict key checking."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..cache import cache_dir
from ..errors import ConfigError
from .calibration import DEFAULT_SEED

FORMATS = ("json", "csv")
_CACHE_KEYS = {"sieve_hi", "zeta_height", "l_height"}
_TOP_KEYS = {"cache_dir", "tolerances", "grids", "workers", "output", "seed", "timing", "cache"}
_OUTPUT_KEYS = {"path", "format"}


@dataclass
class RunConfig:
    """Defaults: cache dir from H8_CACHE_DIR (else ./.h8cache), one worker,
    JSON to stdout, the fixed seed, no timing (so reports are byte-stable),
    sieve cache to 1e8 and zero tables to heights 150 (zeta) and 200 (L)."""

    cache_dir: Path = field(default_factory=cache_dir)
    tolerances: dict[str, float] = field(default_factory=dict)
    grids: dict[str, dict[str, Any]] = field(default_factory=dict)
    workers: int = 1
    output_path: Path | None = None
    output_format: str = "json"
    seed: int = DEFAULT_SEED
    timing: bool = False
    sieve_hi: int = 10**8
    zeta_height: float = 150.0
    l_height: float = 200.0

    def __post_init__(self):
        self.cache_dir = Path(self.cache_dir)
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"unknown {section} key(s): {', '.join(extra)}")


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown("config", data, _TOP_KEYS)
    kwargs: dict[str, Any] = {}
    if "cache_dir" in data:
        kwargs["cache_dir"] = Path(data["cache_dir"])
    for key in ("tolerances", "grids"):
        if key in data:
            if not isinstance(data[key], dict):
                raise ConfigError(f"{key} must be an object")
            kwargs[key] = dict(data[key])
    for key, typ in (("workers", int), ("seed", int), ("timing", bool)):
        if key in data:
            if not isinstance(data[key], typ) or (typ is int and isinstance(data[key], bool)):
                raise ConfigError(f"{key} must be of type {typ.__name__}")
            kwargs[key] = data[key]
    out = data.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output must be an object")
    _reject_unknown("output", out, _OUTPUT_KEYS)
    if out.get("path") is not None:
        kwargs["output_path"] = Path(out["path"])
    if "format" in out:
        kwargs["output_format"] = str(out["format"]).lower()
    cache = data.get("cache", {})
    if not isinstance(cache, dict):
        raise ConfigError("cache must be an object")
    _reject_unknown("cache", cache, _CACHE_KEYS)
    if "sieve_hi" in cache:
        kwargs["sieve_hi"] = int(cache["sieve_hi"])
    for key in ("zeta_height", "l_height"):
        if key in cache:
            kwargs[key] = float(cache[key])
    try:
        return RunConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)
