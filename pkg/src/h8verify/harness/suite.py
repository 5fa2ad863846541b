"""Claim selection and execution."""
from __future__ import annotations

import copy
import fnmatch
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .. import cache as _cache
from ..errors import ConfigError, UnknownClaimError
from .claims import CLAIMS, Claim, RunEnv
from .config import RunConfig
from .report import ClaimReport, Condition, describe_threshold


def select_claims(patterns: Sequence[str]) -> list[str]:
    """Registered ids matching any glob pattern, sorted; every pattern must match."""
    chosen = set()
    for pat in patterns:
        hits = [cid for cid in CLAIMS if fnmatch.fnmatchcase(cid, pat)]
        if not hits:
            raise UnknownClaimError(f"no registered claim matches {pat!r}")
        chosen.update(hits)
    return sorted(chosen)


def _params(claim: Claim, config: RunConfig) -> dict:
    params = copy.deepcopy(claim.defaults)
    override = config.grids.get(claim.claim_id, {})
    unknown = sorted(set(override) - set(params))
    if unknown:
        raise ConfigError(f"{claim.claim_id}: unknown grid parameter(s) {', '.join(unknown)}")
    params.update(copy.deepcopy(override))
    return params


def _conditions(claim: Claim, config: RunConfig) -> list[Condition]:
    out = []
    for c in claim.conditions:
        key = f"{claim.claim_id}.{c.metric}"
        if key in config.tolerances and not isinstance(c.value, str):
            c = Condition(c.metric, c.op, float(config.tolerances[key]))
        out.append(c)
    return out


def _validate(config: RunConfig) -> None:
    for cid in config.grids:
        if cid not in CLAIMS:
            raise ConfigError(f"grids: unknown claim {cid!r}")
    for key in config.tolerances:
        cid, _, metric = key.rpartition(".")
        if cid not in CLAIMS or metric not in {c.metric for c in CLAIMS[cid].conditions}:
            raise ConfigError(f"tolerances: {key!r} names no registered claim condition")


def run_claim(claim: Claim, config: RunConfig, env: RunEnv) -> ClaimReport:
    params = _params(claim, config)
    conditions = _conditions(claim, config)
    start = time.perf_counter()
    metrics = claim.run(params, env)
    elapsed = int(round(1000 * (time.perf_counter() - start))) if config.timing else 0
    passed = all(c.holds(metrics) for c in conditions)
    report_params = dict(sorted(params.items()))
    report_params["seed"] = config.seed
    return ClaimReport(claim.claim_id, report_params, dict(sorted(metrics.items())),
                       describe_threshold(conditions), passed, elapsed)


def run_suite(config: RunConfig, selection: Sequence[str] = ("*",)) -> list[ClaimReport]:
    """Run the selected claims (concurrently up to config.workers); reports
    come back ordered by claim_id regardless of completion order."""
    _validate(config)
    ids = select_claims(selection)
    env = RunEnv(config.seed, config.cache_dir, config.zeta_height, config.l_height)
    previous = _cache._override
    _cache.set_cache_dir(config.cache_dir)
    try:
        if config.workers == 1:
            reports = [run_claim(CLAIMS[cid], config, env) for cid in ids]
        else:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                reports = list(pool.map(lambda cid: run_claim(CLAIMS[cid], config, env), ids))
    finally:
        _cache.set_cache_dir(previous)
    return sorted(reports, key=lambda r: r.claim_id)
