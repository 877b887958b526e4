"""Python bindings for the four-layer trust runtime and simulation harness."""

from ._core import (
    ConfigInvalid,
    UnknownPreset,
    canonical_metric_names,
    expected_calibration_error,
    gum_combine,
    load_preset,
    preset_names,
    run_scenario,
    validate_config,
    verify_run,
    version,
    write_run,
)

__all__ = [
    "ConfigInvalid",
    "UnknownPreset",
    "canonical_metric_names",
    "expected_calibration_error",
    "gum_combine",
    "load_preset",
    "preset_names",
    "run_scenario",
    "validate_config",
    "verify_run",
    "version",
    "write_run",
]

__version__ = version()
