"""Depth solver: Chebyshev-Tau discretization of the depth-separated wave equation.

For one complex horizontal wavenumber this module assembles the block-diagonal global system of the layer
operators, overwrites the last two rows of every block with boundary, interface and source-jump conditions,
solves it by dense LU and reads the Green function back at receiver depths.

The layer map sends each layer top to t = +1 and its bottom to t = -1, so dt/dz = -2 / (z_bot - z_top).
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import lu_factor, lu_solve

from .environment import LayerSpectra, complex_wavenumber, depth_to_t, layer_index_at, layer_profile_spectra
from .errors import MissingSourceInterfaceError, SingularSystemError
from .spectral import SpectralCoeffs, SpectralMatrix, chebyshev_evaluate, derivative_matrix, endpoint_vector, product_matrix
from .waveguide_model import Environment


__all__ = [
    "ConditionKind",
    "ConditionRow",
    "LayerOperator",
    "GlobalSystem",
    "ReceiverMap",
    "DepthSolver",
    "SOURCE_JUMP",
    "SINGULAR_PIVOT",
    "layer_matrix",
    "halfspace_root",
    "build_condition_rows",
    "assemble_global",
    "solve_depth",
    "solve_complex_linear_system",
    "condition_residuals",
]

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]
RealArray = NDArray[np.float64]

ConditionKind = Literal["surface", "bottom", "pressure_continuity", "velocity_continuity", "source_jump"]

SOURCE_JUMP: float = -1.0 / (2.0 * np.pi)
SINGULAR_PIVOT: float = 1e-300


@dataclass(frozen=True, slots=True)
class LayerOperator:
    """Spectral operator A_l of one layer at one wavenumber.

    Attributes:
        matrix (SpectralMatrix): Square operator of dimension N_l + 1.
        layer_index (int): Index of the layer it belongs to.
    """
    matrix: SpectralMatrix
    layer_index: int


@dataclass(frozen=True, slots=True)
class ConditionRow:
    """One linear constraint over the global coefficient vector.

    Attributes:
        row (ComplexArray): Row over the global coefficient space, supported on at most two adjacent blocks.
        value (complex): Right-hand side.
        kind (ConditionKind): Which physical condition the row encodes.
        interface (int | None): Interface index for interface rows, None for surface and bottom.
    """
    row: ComplexArray
    value: complex
    kind: ConditionKind
    interface: int | None = None


@dataclass(frozen=True, slots=True)
class GlobalSystem:
    """Assembled spectral system for one wavenumber.

    Attributes:
        matrix (ComplexArray): Square matrix of dimension sum(N_l + 1).
        rhs (ComplexArray): Right-hand side, zero except the source-jump row.
        block_offsets (tuple[int, ...]): First global index of each layer block.
        conditions (tuple[ConditionRow, ...]): The 2(l+1) rows placed into the block slots.
    """
    matrix: ComplexArray
    rhs: ComplexArray
    block_offsets: tuple[int, ...]
    conditions: tuple[ConditionRow, ...]

    @property
    def dimension(self) -> int:
        return self.rhs.size


@dataclass(frozen=True, slots=True)
class ReceiverMap:
    """Receiver depths grouped by the layer that reads them.

    Attributes:
        depths (RealArray): Receiver depths in caller order.
        groups (tuple[tuple[int, NDArray[np.intp], RealArray], ...]): (layer index, receiver positions,
            mapped t values) per layer holding at least one receiver.
    """
    depths: RealArray
    groups: tuple[tuple[int, NDArray[np.intp], RealArray], ...]


def halfspace_root(kr: complex, k_inf: complex) -> complex:
    """sqrt(kr^2 - k_inf^2) on the branch with non-negative real part (decaying half-space tail)."""
    root = complex(np.sqrt(complex(kr * kr - k_inf * k_inf)))
    return -root if root.real < 0.0 else root


def _static_operator(spectra: LayerSpectra, thickness: float) -> ComplexArray:
    d = derivative_matrix(spectra.order).entries
    c_rho = product_matrix(spectra.rho_hat).entries
    c_inv_rho = product_matrix(spectra.inv_rho_hat).entries
    c_k2 = product_matrix(spectra.k2_hat).entries
    return (4.0 / thickness**2) * (c_rho @ d @ c_inv_rho @ d) + c_k2


def layer_matrix(spectra: LayerSpectra, kr: complex, thickness: float, layer_index: int = 0) -> LayerOperator:
    """Return A_l = 4/dh^2 C_rho D C_{1/rho} D + C_{k^2} - kr^2 E.

    Args:
        spectra: Profile spectra of the layer.
        kr: Complex horizontal wavenumber [1/m].
        thickness: Layer thickness dh [m], positive.
        layer_index: Index recorded on the returned operator.

    Raises:
        ValueError: If dh <= 0 or the spectra orders disagree.
    """
    if thickness <= 0.0:
        raise ValueError(f"layer thickness must be positive, got {thickness}")
    orders = {spectra.rho_hat.order, spectra.inv_rho_hat.order, spectra.k2_hat.order}
    if len(orders) != 1:
        raise ValueError(f"profile spectra orders disagree: {sorted(orders)}")
    entries = _static_operator(spectra, thickness) - kr * kr * np.eye(spectra.order + 1)
    return LayerOperator(SpectralMatrix(entries), layer_index)


def solve_complex_linear_system(matrix: ArrayLike, rhs: ArrayLike, wavenumber: complex = 0j) -> ComplexArray:
    """Solve A x = b by LU with partial pivoting.

    Args:
        matrix: Square complex matrix.
        rhs: Right-hand side of matching dimension.
        wavenumber: Reported in the error when the system is singular.

    Returns:
        The solution vector.

    Raises:
        ValueError: On shape mismatch.
        SingularSystemError: If a pivot falls below 1e-300 in magnitude.
    """
    a = np.asarray(matrix, dtype=np.complex128)
    b = np.asarray(rhs, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match matrix dimension {a.shape[0]}")
    lu, piv = lu_factor(a, check_finite=False)
    smallest = float(np.min(np.abs(np.diag(lu))))
    if not smallest >= SINGULAR_PIVOT:
        raise SingularSystemError(wavenumber, smallest)
    return lu_solve((lu, piv), b, check_finite=False)


class DepthSolver:
    """Solves the depth-separated wave equation of one environment for any complex wavenumber.

    Wavenumber-independent parts (profile spectra, operator templates, condition rows) are built once;
    instances are read-only afterwards and may be shared across worker threads.
    """

    def __init__(self, env: Environment) -> None:
        """Prepare the solver.

        Args:
            env: Environment with a tagged source interface (see insert_source_interface).

        Raises:
            MissingSourceInterfaceError: If no interface carries the source tag.
        """
        if env.source_interface is None:
            raise MissingSourceInterfaceError("environment has no source interface; call insert_source_interface")
        self._env = env
        f = env.source.frequency
        self._spectra = tuple(layer_profile_spectra(layer, f) for layer in env.layers)
        self._orders = tuple(layer.order for layer in env.layers)
        offsets = np.cumsum((0,) + tuple(n + 1 for n in self._orders))
        self._offsets: tuple[int, ...] = tuple(int(o) for o in offsets[:-1])
        self._dimension = int(offsets[-1])
        self._static = tuple(_static_operator(s, s.thickness) for s in self._spectra)
        self._k_inf: complex | None = None
        bottom = env.bottom
        if bottom.kind == "halfspace":
            assert bottom.c_inf is not None and bottom.alpha_inf is not None
            self._k_inf = complex(complex_wavenumber(bottom.c_inf, bottom.alpha_inf, f))
        self._operator_rows = np.concatenate(
            [np.arange(o, o + n - 1) for o, n in zip(self._offsets, self._orders, strict=True)]
        )
        self._template = self._build_template()
        logger.debug(
            "depth solver ready: %d blocks, orders %s, dimension %d", len(self._orders), self._orders, self._dimension
        )

    @property
    def environment(self) -> Environment:
        return self._env

    @property
    def block_offsets(self) -> tuple[int, ...]:
        return self._offsets

    @property
    def dimension(self) -> int:
        return self._dimension

    def layer_operator(self, index: int, kr: complex) -> LayerOperator:
        """A_l of layer `index` at wavenumber kr."""
        entries = self._static[index] - kr * kr * np.eye(self._orders[index] + 1)
        return LayerOperator(SpectralMatrix(entries), index)

    def _value_row(self, index: int, side: Literal["top", "bottom"]) -> ComplexArray:
        row = np.zeros(self._dimension, dtype=np.complex128)
        o, n = self._offsets[index], self._orders[index]
        row[o : o + n + 1] = endpoint_vector(n, side)
        return row

    def _derivative_row(self, index: int, side: Literal["top", "bottom"]) -> ComplexArray:
        row = np.zeros(self._dimension, dtype=np.complex128)
        o, n = self._offsets[index], self._orders[index]
        dt_dz = -2.0 / self._spectra[index].thickness
        row[o : o + n + 1] = dt_dz * (endpoint_vector(n, side) @ derivative_matrix(n).entries)
        return row

    def _interface_rows(self, interface: int) -> tuple[ConditionRow, ConditionRow]:
        above, below = interface, interface + 1
        pressure = (
            self._spectra[below].rho_top * self._value_row(below, "top")
            - self._spectra[above].rho_bot * self._value_row(above, "bottom")
        )
        velocity = self._derivative_row(below, "top") - self._derivative_row(above, "bottom")
        if interface == self._env.source_interface:
            derivative = ConditionRow(velocity, complex(SOURCE_JUMP), "source_jump", interface)
        else:
            derivative = ConditionRow(velocity, 0j, "velocity_continuity", interface)
        return ConditionRow(pressure, 0j, "pressure_continuity", interface), derivative

    def _bottom_row(self, kr: complex) -> ConditionRow:
        last = len(self._orders) - 1
        bottom = self._env.bottom
        if bottom.kind == "pressure_release":
            row = self._value_row(last, "bottom")
        elif bottom.kind == "rigid":
            row = self._derivative_row(last, "bottom")
        else:
            assert bottom.rho_inf is not None and self._k_inf is not None
            gamma = halfspace_root(kr, self._k_inf)
            row = bottom.rho_inf * self._derivative_row(last, "bottom") + (
                self._spectra[last].rho_bot * gamma * self._value_row(last, "bottom")
            )
        return ConditionRow(row, 0j, "bottom")

    def condition_rows(self, kr: complex) -> tuple[ConditionRow, ...]:
        """All 2(l+1) condition rows: surface, then pressure and derivative rows per interface, then bottom."""
        rows: list[ConditionRow] = [ConditionRow(self._value_row(0, "top"), 0j, "surface")]
        for interface in range(len(self._orders) - 1):
            rows.extend(self._interface_rows(interface))
        rows.append(self._bottom_row(kr))
        return tuple(rows)

    def _slot_allocation(self, rows: tuple[ConditionRow, ...]) -> list[tuple[int, ConditionRow]]:
        """Pair each condition with a global row index: the last two rows of every block.

        Block 0 takes {surface, pressure 0}; block l takes {derivative l-1, pressure l}; the last block takes
        {derivative l-1, bottom}.
        """
        blocks = len(self._orders)
        surface, bottom = rows[0], rows[-1]
        pressure = rows[1:-1:2]
        derivative = rows[2:-1:2]
        slots: list[tuple[int, ConditionRow]] = []
        for index in range(blocks):
            first = surface if index == 0 else derivative[index - 1]
            second = bottom if index == blocks - 1 else pressure[index]
            end = self._offsets[index] + self._orders[index]
            slots.append((end - 1, first))
            slots.append((end, second))
        if len(slots) != len(rows) or len({r for r, _ in slots}) != len(slots):
            raise AssertionError(f"condition slot overflow: {len(rows)} conditions for {len(slots)} slots")
        return slots

    def _build_template(self) -> ComplexArray:
        """Global matrix at kr = 0 with all wavenumber-independent condition rows in place."""
        matrix = np.zeros((self._dimension, self._dimension), dtype=np.complex128)
        for o, n, static in zip(self._offsets, self._orders, self._static, strict=True):
            matrix[o : o + n - 1, o : o + n + 1] = static[: n - 1, :]
        for row_index, condition in self._slot_allocation(self.condition_rows(0j)):
            matrix[row_index, :] = condition.row
        return matrix

    def assemble(self, kr: complex) -> GlobalSystem:
        """Assemble the global system at wavenumber kr.

        Each block keeps rows 0..N_l-2 of its layer operator; its last two rows hold condition rows. The right-hand
        side is zero except the source-jump row.
        """
        matrix = self._template.copy()
        matrix[self._operator_rows, self._operator_rows] -= kr * kr
        conditions = self.condition_rows(kr)
        rhs = np.zeros(self._dimension, dtype=np.complex128)
        for row_index, condition in self._slot_allocation(conditions):
            if condition.kind == "bottom":
                matrix[row_index, :] = condition.row
            rhs[row_index] = condition.value
        return GlobalSystem(matrix=matrix, rhs=rhs, block_offsets=self._offsets, conditions=conditions)

    def solve_coefficients(self, kr: complex) -> tuple[SpectralCoeffs, ...]:
        """Per-layer Chebyshev coefficients of the Green function at kr.

        Raises:
            SingularSystemError: If the global system is singular.
        """
        system = self.assemble(kr)
        x = solve_complex_linear_system(system.matrix, system.rhs, kr)
        return tuple(
            SpectralCoeffs.of(x[o : o + n + 1]) for o, n in zip(self._offsets, self._orders, strict=True)
        )

    def receiver_map(self, depths: ArrayLike) -> ReceiverMap:
        """Group receiver depths by layer (interfaces read the layer above).

        Raises:
            ValueError: If a depth lies outside [0, H].
        """
        z = np.asarray(depths, dtype=np.float64).ravel()
        owners = np.array([layer_index_at(self._env, float(d)) for d in z], dtype=np.intp)
        groups: list[tuple[int, NDArray[np.intp], RealArray]] = []
        for index in np.unique(owners):
            positions = np.flatnonzero(owners == index)
            layer = self._env.layers[int(index)]
            groups.append((int(index), positions, depth_to_t(layer, z[positions])))
        return ReceiverMap(depths=z, groups=tuple(groups))

    def evaluate(self, coeffs: tuple[SpectralCoeffs, ...], receivers: ReceiverMap) -> ComplexArray:
        """Inverse Chebyshev transform of the solution at the mapped receivers."""
        values = np.empty(receivers.depths.size, dtype=np.complex128)
        for index, positions, t in receivers.groups:
            values[positions] = chebyshev_evaluate(coeffs[index], t)
        return values

    def solve(self, kr: complex, receivers: ReceiverMap | ArrayLike) -> ComplexArray:
        """Green function Psi(kr, z) at the receivers."""
        mapping = receivers if isinstance(receivers, ReceiverMap) else self.receiver_map(receivers)
        return self.evaluate(self.solve_coefficients(kr), mapping)


def build_condition_rows(env: Environment, kr: complex) -> tuple[ConditionRow, ...]:
    """Return the 2(l+1) condition rows of a tagged environment at wavenumber kr."""
    return DepthSolver(env).condition_rows(kr)


def assemble_global(env: Environment, kr: complex) -> GlobalSystem:
    """Assemble the global spectral system of a tagged environment at wavenumber kr."""
    return DepthSolver(env).assemble(kr)


def solve_depth(env: Environment, kr: complex, receiver_depths: ArrayLike) -> ComplexArray:
    """Solve for Psi(kr, z) at receiver depths in [0, H]."""
    return DepthSolver(env).solve(kr, receiver_depths)


def condition_residuals(
    solver: DepthSolver, kr: complex, coeffs: tuple[SpectralCoeffs, ...]
) -> list[tuple[ConditionKind, int | None, float]]:
    """Residual |row . x - value| of every physical condition, relative to max |Psi| on the layer ends.

    Returns:
        (kind, interface, relative residual) per condition, in condition_rows order.
    """
    x = np.concatenate([c.coeffs for c in coeffs])
    ends = np.concatenate([[chebyshev_evaluate(c, 1.0), chebyshev_evaluate(c, -1.0)] for c in coeffs])
    scale = max(float(np.max(np.abs(ends))), np.finfo(np.float64).tiny)
    report: list[tuple[ConditionKind, int | None, float]] = []
    for condition in solver.condition_rows(kr):
        residual = abs(complex(condition.row @ x) - condition.value)
        report.append((condition.kind, condition.interface, residual / scale))
    return report
