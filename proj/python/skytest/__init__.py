"""Python face of the skytest harness (thin re-export of the native module)."""

from _skytest import (
    Scenario,
    apply_preset,
    canonicalize,
    diff_logs,
    generate,
    log_info,
    parse_scenario,
    run,
    scenario_hash,
)

__all__ = [
    "Scenario",
    "apply_preset",
    "canonicalize",
    "diff_logs",
    "generate",
    "log_info",
    "parse_scenario",
    "run",
    "scenario_hash",
]
