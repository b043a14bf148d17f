"""Dual-speed dual-motor actuator simulator.

Configs are passed as JSON text; `load_config` reads one from disk.
"""

from pathlib import Path

from ._dsdm import (
    MassModel,
    SimulationFault,
    check,
    default_config,
    describe,
    normalize_config,
    output_speed,
    reflected_output_mass,
    run_scenario,
    scenario_names,
    sizing_crossover,
    sizing_sweep,
    torque_split,
    trace_csv,
    winding_loss,
)


def load_config(path):
    """Read and validate a JSON setup file, returning its normalized text."""
    return normalize_config(Path(path).read_text())


__all__ = [
    "MassModel",
    "SimulationFault",
    "check",
    "default_config",
    "describe",
    "load_config",
    "normalize_config",
    "output_speed",
    "reflected_output_mass",
    "run_scenario",
    "scenario_names",
    "sizing_crossover",
    "sizing_sweep",
    "torque_split",
    "trace_csv",
    "winding_loss",
]
