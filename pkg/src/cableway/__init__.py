"""Eigenvalues and natural frequencies of a taut cable carrying point loads."""

from .charfn import (
    characteristic_moving_loads,
    characteristic_recurrence,
    characteristic_static,
    closed_form_two_mass,
    interval_transfer,
    load_interface,
    normal_fundamental_pair,
)
from .model import (
    CableSpec,
    LoadSpec,
    MotionSpec,
    ProblemInstance,
    TimeWindow,
    ValidationError,
    validate,
    validate_window,
    wave_speed,
)
from .rootfind import FewerRootsFound, RootList, RootSearchConfig, find_eigenvalues, refine_root
from .spectra import (
    SpectrumResult,
    SweepResult,
    moving_load_spectrum,
    moving_system_frequencies,
    static_spectrum,
    sweep,
    theorem_checks,
)

__version__ = "0.1.0"

__all__ = [
    "CableSpec",
    "FewerRootsFound",
    "LoadSpec",
    "MotionSpec",
    "ProblemInstance",
    "RootList",
    "RootSearchConfig",
    "SpectrumResult",
    "SweepResult",
    "TimeWindow",
    "ValidationError",
    "characteristic_moving_loads",
    "characteristic_recurrence",
    "characteristic_static",
    "closed_form_two_mass",
    "find_eigenvalues",
    "interval_transfer",
    "load_interface",
    "moving_load_spectrum",
    "moving_system_frequencies",
    "normal_fundamental_pair",
    "refine_root",
    "static_spectrum",
    "sweep",
    "theorem_checks",
    "validate",
    "validate_window",
    "wave_speed",
]
