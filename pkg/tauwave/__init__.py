"""tauwave: Chebyshev-Tau wavenumber integration for horizontally stratified fluid waveguides."""

from __future__ import annotations
import logging

from .depth_solver import DepthSolver, solve_depth
from .environment import complex_wavenumber, insert_source_interface
from .errors import (
    ConfigError,
    InvalidEnvironmentError,
    MissingSourceInterfaceError,
    SingularSystemError,
    SweepFailedError,
    TauwaveError,
)
from .kspace import greens_sweep, make_grid, pressure_and_tl, synthesize
from .waveguide_model import BottomCondition, ConstantProfile, Environment, Layer, SourceSpec


__all__ = [
    "BottomCondition",
    "ConfigError",
    "ConstantProfile",
    "DepthSolver",
    "Environment",
    "InvalidEnvironmentError",
    "Layer",
    "MissingSourceInterfaceError",
    "SingularSystemError",
    "SourceSpec",
    "SweepFailedError",
    "TauwaveError",
    "complex_wavenumber",
    "greens_sweep",
    "insert_source_interface",
    "make_grid",
    "pressure_and_tl",
    "solve_depth",
    "synthesize",
]

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())
