"""Claim registry, suite runner, reports, cache administration, CLI."""
from .cache_admin import Action, Scope, cache_admin
from .claims import CLAIMS, REGISTRY_VERSION
from .config import RunConfig, config_from_dict, load_config
from .report import ClaimReport, emit_report, evaluate_threshold
from .suite import run_suite, select_claims

__all__ = [
    "Action", "Scope", "cache_admin", "CLAIMS", "REGISTRY_VERSION", "RunConfig", "config_from_dict",
    "load_config", "ClaimReport", "emit_report", "evaluate_threshold", "run_suite", "select_claims",
]
