"""Exception hierarchy for tauwave.

Library code raises these (or plain ValueError for primitive preconditions); the CLI maps them to exit codes.
"""

from __future__ import annotations


__all__ = [
    "TauwaveError",
    "ConfigError",
    "InvalidEnvironmentError",
    "MissingSourceInterfaceError",
    "SingularSystemError",
    "SweepFailedError",
]


class TauwaveError(Exception):
    """Base class for all tauwave errors."""


class ConfigError(TauwaveError, ValueError):
    """A run configuration key is missing or violates a constraint.

    Attributes:
        key (str): The offending configuration key.
        constraint (str): Human readable constraint that failed.
    """

    def __init__(self, key: str, constraint: str, line: int | None = None) -> None:
        self.key = key
        self.constraint = constraint
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"config key '{key}'{where}: {constraint}")


class InvalidEnvironmentError(TauwaveError, ValueError):
    """The waveguide description violates a data-model invariant."""


class MissingSourceInterfaceError(InvalidEnvironmentError):
    """The environment has no interface tagged as the source interface."""


class SingularSystemError(TauwaveError, ArithmeticError):
    """The global spectral system could not be factorized at a wavenumber.

    Attributes:
        wavenumber (complex): The complex horizontal wavenumber of the failed solve.
    """

    def __init__(self, wavenumber: complex, pivot: float) -> None:
        self.wavenumber = wavenumber
        self.pivot = pivot
        super().__init__(f"singular depth system at kr={wavenumber:.8g} (smallest pivot {pivot:.3e})")


class SweepFailedError(TauwaveError, RuntimeError):
    """Too many wavenumber columns of a sweep were singular."""
