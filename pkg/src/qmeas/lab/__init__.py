"""Scenario runner: each result of the theory as a named, seeded experiment."""

from .config import DEFAULTS, SCHEMA, build_measure, load, validate
from .report import Report, Row, to_csv, to_json, to_table
from .scenarios import REGISTRY, Scenario, effective_config, list_scenarios, run_scenario

__all__ = [
    "DEFAULTS", "REGISTRY", "Report", "Row", "SCHEMA", "Scenario", "build_measure",
    "effective_config", "list_scenarios", "load", "run_scenario", "to_csv", "to_json",
    "to_table", "validate",
]
