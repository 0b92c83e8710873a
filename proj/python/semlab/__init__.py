"""Heat-smoothing inequalities on finite metric measure spaces."""

from ._core import (
    Control,
    Heat,
    SemlabError,
    Space,
    fit_power_control,
    j_K,
    log_grid,
    log_threshold_T,
    parse_config,
    power_from_log,
    run_scenario,
    run_suite,
)

__all__ = [
    "Control",
    "Heat",
    "SemlabError",
    "Space",
    "fit_power_control",
    "j_K",
    "log_grid",
    "log_threshold_T",
    "parse_config",
    "power_from_log",
    "run_scenario",
    "run_suite",
]
