"""Environment operations for tauwave.

Complex wavenumbers, insertion of the virtual source interface, the per-layer depth map onto [-1, 1] and the
Chebyshev spectra of the profile operands used by the layer operators.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import InvalidEnvironmentError
from .spectral import SpectralCoeffs, cgl_nodes, chebyshev_forward
from .waveguide_model import INTERFACE_TOLERANCE, Environment, Layer


__all__ = [
    "LayerSpectra",
    "ETA",
    "complex_wavenumber",
    "insert_source_interface",
    "layer_profile_spectra",
    "depth_to_t",
    "t_to_depth",
    "layer_index_at",
    "sample_layer",
    "reference_wavenumber",
]

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

ETA: float = 1.0 / (40.0 * np.pi * np.log10(np.e))


@dataclass(frozen=True, slots=True)
class LayerSpectra:
    """Chebyshev spectra of the layer operator operands.

    Attributes:
        rho_hat (SpectralCoeffs): Density.
        inv_rho_hat (SpectralCoeffs): Reciprocal density.
        k2_hat (SpectralCoeffs): Squared complex wavenumber k^2(z).
        rho_top (float): Density at the layer top.
        rho_bot (float): Density at the layer bottom.
        thickness (float): Layer thickness [m].
    """
    rho_hat: SpectralCoeffs
    inv_rho_hat: SpectralCoeffs
    k2_hat: SpectralCoeffs
    rho_top: float
    rho_bot: float
    thickness: float

    @property
    def order(self) -> int:
        return self.rho_hat.order


def complex_wavenumber(c: ArrayLike, alpha: ArrayLike, f: float) -> ComplexArray:
    """Return k = (2 pi f / c)(1 + i eta alpha), eta = 1 / (40 pi log10 e).

    Args:
        c: Sound speed [m/s], positive.
        alpha: Attenuation [dB/wavelength], non-negative.
        f: Frequency [Hz], positive.

    Raises:
        ValueError: On non-positive c or f, or negative alpha.
    """
    speed = np.asarray(c, dtype=np.float64)
    atten = np.asarray(alpha, dtype=np.float64)
    if f <= 0.0:
        raise ValueError(f"frequency must be positive, got {f}")
    if np.any(~np.isfinite(speed)) or np.any(speed <= 0.0):
        raise ValueError(f"sound speed must be finite and positive, got {speed}")
    if np.any(atten < 0.0):
        raise ValueError(f"attenuation must be non-negative, got {atten}")
    return (2.0 * np.pi * f / speed) * (1.0 + 1j * ETA * atten)


def depth_to_t(layer: Layer, z: ArrayLike) -> RealArray:
    """Map depth in [z_top, z_bot] to t in [+1, -1]; the layer top goes to t = +1."""
    depth = np.asarray(z, dtype=np.float64)
    return 2.0 * depth / (layer.z_top - layer.z_bot) + (layer.z_bot + layer.z_top) / (layer.z_bot - layer.z_top)


def t_to_depth(layer: Layer, t: ArrayLike) -> RealArray:
    """Inverse of depth_to_t."""
    points = np.asarray(t, dtype=np.float64)
    return 0.5 * (layer.z_top + layer.z_bot) - 0.5 * points * layer.thickness


def layer_index_at(env: Environment, z: float) -> int:
    """Index of the layer holding depth z; a depth on an interface belongs to the layer above.

    Raises:
        ValueError: If z lies outside [0, H].
    """
    if z < 0.0 or z > env.depth:
        raise ValueError(f"depth {z} outside the water column [0, {env.depth}]")
    for index, layer in enumerate(env.layers):
        if z <= layer.z_bot:
            return index
    return len(env.layers) - 1


def insert_source_interface(env: Environment) -> Environment:
    """Return an environment whose source depth is a tagged interface.

    A source strictly inside a layer splits it into two halves sharing the parent's profiles and order; a source
    on an existing interface only tags it.

    Raises:
        InvalidEnvironmentError: If the source sits on the surface or the bottom.
    """
    z_s = env.source.depth
    if z_s <= 0.0 or z_s >= env.depth:
        raise InvalidEnvironmentError(f"source on the outer boundary is unsupported (z_s={z_s})")
    if env.source_interface is not None:
        return env
    for index, depth in enumerate(env.interface_depths):
        if abs(depth - z_s) <= INTERFACE_TOLERANCE:
            logger.debug("source at %.6g m coincides with interface %d", z_s, index)
            return replace(env, source_interface=index)
    host = layer_index_at(env, z_s)
    parent = env.layers[host]
    upper = replace(parent, z_bot=z_s)
    lower = replace(parent, z_top=z_s)
    layers = env.layers[:host] + (upper, lower) + env.layers[host + 1 :]
    logger.debug("split layer %d at source depth %.6g m", host, z_s)
    return replace(env, layers=layers, source_interface=host)


def sample_layer(layer: Layer, z: ArrayLike) -> tuple[RealArray, RealArray, RealArray]:
    """Evaluate (c, rho, alpha) at depths z, checking physical ranges.

    Raises:
        InvalidEnvironmentError: If c or rho is non-positive or non-finite, or alpha negative.
    """
    c = layer.c.evaluate(z)
    rho = layer.rho.evaluate(z)
    alpha = layer.alpha.evaluate(z)
    if not np.all(np.isfinite(c)) or np.any(c <= 0.0):
        raise InvalidEnvironmentError(f"sound speed must be finite and positive in layer [{layer.z_top}, {layer.z_bot}]")
    if not np.all(np.isfinite(rho)) or np.any(rho <= 0.0):
        raise InvalidEnvironmentError(f"density must be finite and positive in layer [{layer.z_top}, {layer.z_bot}]")
    if not np.all(np.isfinite(alpha)) or np.any(alpha < 0.0):
        raise InvalidEnvironmentError(f"attenuation must be non-negative in layer [{layer.z_top}, {layer.z_bot}]")
    return c, rho, alpha


def layer_profile_spectra(layer: Layer, f: float) -> LayerSpectra:
    """Chebyshev spectra of rho, 1/rho and k^2(z) sampled at the layer's own CGL nodes.

    Args:
        layer: The layer.
        f: Frequency [Hz].

    Returns:
        LayerSpectra of order layer.order.
    """
    z = t_to_depth(layer, cgl_nodes(layer.order))
    c, rho, alpha = sample_layer(layer, z)
    k = complex_wavenumber(c, alpha, f)
    rho_ends = sample_layer(layer, np.array([layer.z_top, layer.z_bot]))[1]
    return LayerSpectra(
        rho_hat=chebyshev_forward(rho),
        inv_rho_hat=chebyshev_forward(1.0 / rho),
        k2_hat=chebyshev_forward(k * k),
        rho_top=float(rho_ends[0]),
        rho_bot=float(rho_ends[1]),
        thickness=layer.thickness,
    )


def reference_wavenumber(env: Environment) -> float:
    """Largest real water wavenumber omega / min c over the CGL samples of all layers."""
    slowest = min(
        float(np.min(sample_layer(layer, t_to_depth(layer, cgl_nodes(layer.order)))[0])) for layer in env.layers
    )
    return env.source.omega / slowest
