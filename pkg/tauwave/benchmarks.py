"""Named benchmark waveguides.

Each factory returns a Benchmark: an environment plus the wavenumber sample count, probe depth and maximum range
the case is normally run with. The wavenumber interval is [0, 2 k0] throughout.
"""

from __future__ import annotations
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

from .reference import PEAK_THRESHOLD, Seabed
from .waveguide_model import (
    BottomCondition,
    ConstantProfile,
    Environment,
    Layer,
    MunkProfile,
    PseudolinearProfile,
    SourceSpec,
    TabulatedProfile,
)


__all__ = [
    "Benchmark",
    "ideal_waveguide",
    "pseudolinear_waveguide",
    "pekeris_waveguide",
    "bucker_waveguide",
    "munk_waveguide",
    "PRESETS",
    "get_benchmark",
    "PSEUDOLINEAR_A",
    "PSEUDOLINEAR_B",
]

PSEUDOLINEAR_A: float = 5.94e-10
PSEUDOLINEAR_B: float = 4.16e-7


@dataclass(frozen=True, slots=True)
class Benchmark:
    """A ready-to-run benchmark case.

    Attributes:
        name (str): Preset name.
        environment (Environment): The waveguide, untagged.
        samples (int): Wavenumber sample count M.
        probe_depth (float): Depth of the spectrum and TL-line products [m].
        max_range (float): Largest range of the TL grid [m].
        peak_threshold (float): Spectrum peak threshold as a fraction of the largest peak.
    """
    name: str
    environment: Environment
    samples: int
    probe_depth: float
    max_range: float
    peak_threshold: float = PEAK_THRESHOLD


def _bottom(seabed: Seabed) -> BottomCondition:
    return BottomCondition("pressure_release" if seabed == "free" else "rigid")


def ideal_waveguide(seabed: Seabed = "free", order: int = 10) -> Benchmark:
    """Homogeneous 100 m water column, c = 1500 m/s, f = 20 Hz, source at 36 m."""
    layer = Layer(0.0, 100.0, ConstantProfile(1500.0), ConstantProfile(1.0), ConstantProfile(0.0), order)
    env = Environment((layer,), _bottom(seabed), SourceSpec("point", 36.0, 20.0))
    return Benchmark(f"ideal-{seabed}", env, samples=2048, probe_depth=46.0, max_range=3000.0)


def pseudolinear_waveguide(seabed: Seabed = "rigid", order: int = 15) -> Benchmark:
    """100 m column with c = sqrt(1/(a z + b)), f = 50 Hz, source at 25 m."""
    layer = Layer(
        0.0,
        100.0,
        PseudolinearProfile(PSEUDOLINEAR_A, PSEUDOLINEAR_B),
        ConstantProfile(1.0),
        ConstantProfile(0.0),
        order,
    )
    env = Environment((layer,), _bottom(seabed), SourceSpec("point", 25.0, 50.0))
    return Benchmark(
        f"pseudolinear-{seabed}", env, samples=4096, probe_depth=50.0, max_range=3000.0, peak_threshold=0.01
    )


def pekeris_waveguide(geometry: Literal["point", "line"] = "point", order: int = 10) -> Benchmark:
    """Ideal-waveguide water column at f = 50 Hz over a half-space c = 2000, rho = 1.5, alpha = 0.5."""
    layer = Layer(0.0, 100.0, ConstantProfile(1500.0), ConstantProfile(1.0), ConstantProfile(0.0), order)
    bottom = BottomCondition("halfspace", c_inf=2000.0, rho_inf=1.5, alpha_inf=0.5)
    env = Environment((layer,), bottom, SourceSpec(geometry, 36.0, 50.0))
    name = "pekeris" if geometry == "point" else "pekeris-line"
    return Benchmark(name, env, samples=2048, probe_depth=46.0, max_range=3000.0)


def bucker_waveguide(order: int = 40) -> Benchmark:
    """240 m column with a 1498 m/s minimum at 120 m over a dense half-space, f = 100 Hz, source at 30 m.

    The water column is split at the profile kink so each layer holds a linear profile.
    """
    water = (ConstantProfile(1.0), ConstantProfile(0.0))
    upper = Layer(0.0, 120.0, TabulatedProfile((0.0, 120.0), (1500.0, 1498.0)), *water, order)
    lower = Layer(120.0, 240.0, TabulatedProfile((120.0, 240.0), (1498.0, 1500.0)), *water, order)
    bottom = BottomCondition("halfspace", c_inf=1505.0, rho_inf=2.1, alpha_inf=0.0)
    env = Environment((upper, lower), bottom, SourceSpec("point", 30.0, 100.0))
    return Benchmark("bucker", env, samples=4096, probe_depth=100.0, max_range=10000.0)


def munk_waveguide(order: int = 400) -> Benchmark:
    """5000 m deep-water column with the Munk profile over a half-space c = 1600, f = 50 Hz, source at 100 m."""
    layer = Layer(0.0, 5000.0, MunkProfile(), ConstantProfile(1.0), ConstantProfile(0.0), order)
    bottom = BottomCondition("halfspace", c_inf=1600.0, rho_inf=1.0, alpha_inf=0.0)
    env = Environment((layer,), bottom, SourceSpec("point", 100.0, 50.0))
    return Benchmark("munk", env, samples=55000, probe_depth=1000.0, max_range=100000.0)


PRESETS: dict[str, Callable[[], Benchmark]] = {
    "ideal-free": lambda: ideal_waveguide("free"),
    "ideal-rigid": lambda: ideal_waveguide("rigid"),
    "pseudolinear-free": lambda: pseudolinear_waveguide("free"),
    "pseudolinear-rigid": lambda: pseudolinear_waveguide("rigid"),
    "pekeris": lambda: pekeris_waveguide("point"),
    "pekeris-line": lambda: pekeris_waveguide("line"),
    "bucker": bucker_waveguide,
    "munk": munk_waveguide,
}


def get_benchmark(name: str) -> Benchmark:
    """Look up a preset by name.

    Raises:
        ValueError: If the name is unknown.
    """
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
    return factory()
