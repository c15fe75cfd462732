"""Waveguide model definitions for tauwave.

Core data models of a horizontally stratified fluid waveguide: depth profiles, layers, the bottom condition, the
source and the environment that ties them together. All models are immutable and validate their invariants on
construction.

Units are fixed: depths m, speeds m/s, densities g/cm^3, attenuation dB/wavelength, frequency Hz.
"""

from __future__ import annotations
from dataclasses import dataclass
from typing import ClassVar, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidEnvironmentError
from .reference import munk_profile, pseudolinear_profile


__all__ = [
    "ConstantProfile",
    "TabulatedProfile",
    "MunkProfile",
    "PseudolinearProfile",
    "Profile",
    "Layer",
    "BottomCondition",
    "SourceSpec",
    "Environment",
    "MIN_LAYER_ORDER",
    "INTERFACE_TOLERANCE",
]

RealArray = NDArray[np.float64]

MIN_LAYER_ORDER: int = 4
INTERFACE_TOLERANCE: float = 1e-9


@dataclass(frozen=True, slots=True)
class ConstantProfile:
    """Depth-independent value.

    Attributes:
        value (float): The constant.
    """
    kind: ClassVar[str] = "constant"
    value: float

    def evaluate(self, z: ArrayLike) -> RealArray:
        return np.full(np.shape(z), self.value, dtype=np.float64)


@dataclass(frozen=True, slots=True)
class TabulatedProfile:
    """Sampled profile, piecewise linear between samples.

    Attributes:
        depths (tuple[float, ...]): Sample depths, strictly increasing.
        values (tuple[float, ...]): Sample values.
    """
    kind: ClassVar[str] = "table"
    depths: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.depths) != len(self.values) or len(self.depths) < 2:
            raise InvalidEnvironmentError("tabulated profile needs at least two (depth, value) pairs")
        if any(b <= a for a, b in zip(self.depths, self.depths[1:])):
            raise InvalidEnvironmentError(f"tabulated profile depths must be strictly increasing: {self.depths}")

    def evaluate(self, z: ArrayLike) -> RealArray:
        return np.interp(np.asarray(z, dtype=np.float64), self.depths, self.values)

    def covers(self, z_top: float, z_bot: float) -> bool:
        return self.depths[0] <= z_top and self.depths[-1] >= z_bot


@dataclass(frozen=True, slots=True)
class MunkProfile:
    """Munk canonical sound speed profile.

    Attributes:
        c_axis (float): Speed on the channel axis [m/s].
        z_axis (float): Channel axis depth [m].
        scale (float): Depth scale of the normalized coordinate [m].
        epsilon (float): Perturbation coefficient.
    """
    kind: ClassVar[str] = "munk"
    c_axis: float = 1500.0
    z_axis: float = 1300.0
    scale: float = 650.0
    epsilon: float = 0.00737

    def evaluate(self, z: ArrayLike) -> RealArray:
        return munk_profile(z, self.c_axis, self.z_axis, self.scale, self.epsilon)


@dataclass(frozen=True, slots=True)
class PseudolinearProfile:
    """Sound speed c = sqrt(1 / (a z + b)).

    Attributes:
        a (float): Slowness-squared gradient [s^2/m^3].
        b (float): Surface slowness squared [s^2/m^2].
    """
    kind: ClassVar[str] = "pseudolinear"
    a: float
    b: float

    def evaluate(self, z: ArrayLike) -> RealArray:
        return pseudolinear_profile(z, self.a, self.b)

    def positive_over(self, z_top: float, z_bot: float) -> bool:
        # a z + b is linear, so the endpoints decide
        return min(self.a * z_top, self.a * z_bot) + self.b > 0.0


Profile = ConstantProfile | TabulatedProfile | MunkProfile | PseudolinearProfile


@dataclass(frozen=True, slots=True)
class Layer:
    """One fluid layer [z_top, z_bot] with its own Chebyshev expansion.

    Attributes:
        z_top (float): Top depth [m].
        z_bot (float): Bottom depth [m].
        c (Profile): Sound speed [m/s].
        rho (Profile): Density [g/cm^3].
        alpha (Profile): Attenuation [dB/wavelength].
        order (int): Spectral truncation order N of this layer.
    """
    z_top: float
    z_bot: float
    c: Profile
    rho: Profile
    alpha: Profile
    order: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.z_top < self.z_bot):
            raise InvalidEnvironmentError(f"layer needs 0 <= z_top < z_bot, got [{self.z_top}, {self.z_bot}]")
        if self.order < MIN_LAYER_ORDER:
            raise InvalidEnvironmentError(f"layer order must be >= {MIN_LAYER_ORDER}, got {self.order}")
        for name, profile in (("c", self.c), ("rho", self.rho), ("alpha", self.alpha)):
            if isinstance(profile, TabulatedProfile) and not profile.covers(self.z_top, self.z_bot):
                raise InvalidEnvironmentError(
                    f"tabulated {name} profile does not cover layer [{self.z_top}, {self.z_bot}]"
                )
            if isinstance(profile, PseudolinearProfile) and not profile.positive_over(self.z_top, self.z_bot):
                raise InvalidEnvironmentError(
                    f"pseudolinear {name} profile needs a*z + b > 0 over layer [{self.z_top}, {self.z_bot}]"
                )

    @property
    def thickness(self) -> float:
        return self.z_bot - self.z_top


@dataclass(frozen=True, slots=True)
class BottomCondition:
    """Lower boundary of the water column.

    Attributes:
        kind (Literal["pressure_release", "rigid", "halfspace"]): Boundary type.
        c_inf (float | None): Half-space sound speed [m/s].
        rho_inf (float | None): Half-space density [g/cm^3].
        alpha_inf (float | None): Half-space attenuation [dB/wavelength].
    """
    kind: Literal["pressure_release", "rigid", "halfspace"]
    c_inf: float | None = None
    rho_inf: float | None = None
    alpha_inf: float | None = None

    def __post_init__(self) -> None:
        if self.kind != "halfspace":
            return
        if self.c_inf is None or self.rho_inf is None or self.alpha_inf is None:
            raise InvalidEnvironmentError("half-space bottom needs c_inf, rho_inf and alpha_inf")
        if self.c_inf <= 0.0 or self.rho_inf <= 0.0 or self.alpha_inf < 0.0:
            raise InvalidEnvironmentError(
                f"half-space parameters must be positive: c={self.c_inf}, rho={self.rho_inf}, alpha={self.alpha_inf}"
            )


@dataclass(frozen=True, slots=True)
class SourceSpec:
    """Harmonic source.

    Attributes:
        geometry (Literal["point", "line"]): Point source (cylindrical) or line source (Cartesian).
        depth (float): Source depth z_s [m].
        frequency (float): Frequency f [Hz].
    """
    geometry: Literal["point", "line"]
    depth: float
    frequency: float

    def __post_init__(self) -> None:
        if self.frequency <= 0.0:
            raise InvalidEnvironmentError(f"source frequency must be positive, got {self.frequency}")

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.frequency


@dataclass(frozen=True, slots=True)
class Environment:
    """Horizontally stratified waveguide with a pressure-release surface.

    Attributes:
        layers (tuple[Layer, ...]): Contiguous layers from the surface down.
        bottom (BottomCondition): Lower boundary at depth H.
        source (SourceSpec): The source.
        source_interface (int | None): Index i of the interface between layers i and i+1 that carries the
            source jump, or None before insert_source_interface.
    """
    layers: tuple[Layer, ...]
    bottom: BottomCondition
    source: SourceSpec
    source_interface: int | None = None

    def __post_init__(self) -> None:
        if not self.layers:
            raise InvalidEnvironmentError("environment needs at least one layer")
        if self.layers[0].z_top != 0.0:
            raise InvalidEnvironmentError(f"first layer must start at the surface, got {self.layers[0].z_top}")
        for upper, lower in zip(self.layers, self.layers[1:]):
            if upper.z_bot != lower.z_top:
                raise InvalidEnvironmentError(f"layers not contiguous at {upper.z_bot} / {lower.z_top}")
        if not (0.0 < self.source.depth < self.depth):
            raise InvalidEnvironmentError(
                f"source depth must satisfy 0 < z_s < H={self.depth}, got {self.source.depth}"
            )
        if self.source_interface is not None:
            if not (0 <= self.source_interface < len(self.layers) - 1):
                raise InvalidEnvironmentError(f"source interface index {self.source_interface} out of range")
            if abs(self.interface_depths[self.source_interface] - self.source.depth) > INTERFACE_TOLERANCE:
                raise InvalidEnvironmentError("source interface does not sit at the source depth")

    @property
    def depth(self) -> float:
        """Total depth H [m]."""
        return self.layers[-1].z_bot

    @property
    def interface_depths(self) -> tuple[float, ...]:
        """Depths of the interior interfaces, top to bottom."""
        return tuple(layer.z_bot for layer in self.layers[:-1])
