"""Tests for the depth solver: layer operators, condition rows, global assembly and the dense solve."""

from collections.abc import Callable
from dataclasses import replace
from typing import Literal

import numpy as np
import pytest

from tauwave.benchmarks import pseudolinear_waveguide
from tauwave.depth_solver import (
    SOURCE_JUMP,
    DepthSolver,
    assemble_global,
    build_condition_rows,
    condition_residuals,
    halfspace_root,
    layer_matrix,
    solve_complex_linear_system,
    solve_depth,
)
from tauwave.environment import LayerSpectra, insert_source_interface, layer_profile_spectra, t_to_depth
from tauwave.errors import MissingSourceInterfaceError, SingularSystemError
from tauwave.spectral import SpectralCoeffs, cgl_nodes, chebyshev_forward, derivative_matrix
from tauwave.waveguide_model import BottomCondition, ConstantProfile, Environment, Layer, SourceSpec


K0 = 2.0 * np.pi * 20.0 / 1500.0


def _ideal(
    bottom: BottomCondition, order: int = 10, geometry: Literal["point", "line"] = "point"
) -> Environment:
    water = Layer(0.0, 100.0, ConstantProfile(1500.0), ConstantProfile(1.0), ConstantProfile(0.0), order)
    return Environment((water,), bottom, SourceSpec(geometry, 36.0, 20.0))


@pytest.fixture
def free_env() -> Environment:
    return insert_source_interface(_ideal(BottomCondition("pressure_release")))


@pytest.fixture
def rigid_env() -> Environment:
    return insert_source_interface(_ideal(BottomCondition("rigid"), order=16))


@pytest.fixture
def pekeris_env() -> Environment:
    return insert_source_interface(_ideal(BottomCondition("halfspace", 2000.0, 1.5, 0.5)))


def _coefficients_of(env: Environment, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Global coefficient vector interpolating fn(z) on every layer."""
    parts = [chebyshev_forward(fn(t_to_depth(layer, cgl_nodes(layer.order)))).coeffs for layer in env.layers]
    return np.concatenate(parts)


def test_layer_matrix_order_two_by_hand() -> None:
    k2 = 0.01 + 0.001j
    spectra = LayerSpectra(
        rho_hat=SpectralCoeffs.of([1.0, 0.0, 0.0]),
        inv_rho_hat=SpectralCoeffs.of([1.0, 0.0, 0.0]),
        k2_hat=SpectralCoeffs.of([k2, 0.0, 0.0]),
        rho_top=1.0,
        rho_bot=1.0,
        thickness=2.0,
    )
    kr = 0.05 - 0.001j
    operator = layer_matrix(spectra, kr, thickness=2.0, layer_index=3)
    d = derivative_matrix(2).entries
    expected = d @ d + (k2 - kr * kr) * np.eye(3)
    assert operator.layer_index == 3
    assert operator.matrix.entries == pytest.approx(expected)
    assert operator.matrix.entries[0, 2] == pytest.approx(4.0)


@pytest.mark.edge
def test_layer_matrix_validation() -> None:
    one = SpectralCoeffs.of([1.0, 0.0, 0.0])
    spectra = LayerSpectra(one, one, SpectralCoeffs.of([1.0, 0.0]), 1.0, 1.0, 10.0)
    with pytest.raises(ValueError):
        layer_matrix(spectra, 0.1, thickness=10.0)
    good = replace(spectra, k2_hat=one)
    with pytest.raises(ValueError):
        layer_matrix(good, 0.1, thickness=0.0)


def test_solver_layer_operator_matches_layer_matrix(free_env: Environment) -> None:
    solver = DepthSolver(free_env)
    spectra = layer_profile_spectra(free_env.layers[1], 20.0)
    kr = 0.06 - 1e-4j
    direct = layer_matrix(spectra, kr, spectra.thickness, 1).matrix.entries
    assert solver.layer_operator(1, kr).matrix.entries == pytest.approx(direct)


def test_halfspace_root_branch() -> None:
    # propagating in the half-space: sqrt of a negative real picks +i, real part zero
    root = halfspace_root(0.05 + 0j, 0.1 + 0j)
    assert root.real >= 0.0
    assert root == pytest.approx(np.sqrt(0.05**2 - 0.1**2 + 0j))
    decaying = halfspace_root(0.2 - 1e-4j, 0.1 + 1e-3j)
    assert decaying.real > 0.0
    assert decaying * decaying == pytest.approx((0.2 - 1e-4j) ** 2 - (0.1 + 1e-3j) ** 2)


def test_assemble_global_structure(free_env: Environment) -> None:
    system = assemble_global(free_env, 0.06 - 1e-4j)
    assert system.dimension == 22
    assert system.block_offsets == (0, 11)
    assert [c.kind for c in system.conditions] == ["surface", "pressure_continuity", "source_jump", "bottom"]
    nonzero = np.flatnonzero(system.rhs)
    assert nonzero.size == 1
    assert system.rhs[nonzero[0]] == pytest.approx(SOURCE_JUMP)
    # the source jump sits in the first slot of block 1
    assert nonzero[0] == 11 + 10 - 1


def test_condition_rows_order_with_extra_interface() -> None:
    water = Layer(0.0, 50.0, ConstantProfile(1500.0), ConstantProfile(1.0), ConstantProfile(0.0), 8)
    sediment = Layer(50.0, 100.0, ConstantProfile(1600.0), ConstantProfile(1.8), ConstantProfile(0.2), 8)
    env = insert_source_interface(
        Environment((water, sediment), BottomCondition("rigid"), SourceSpec("point", 36.0, 20.0))
    )
    rows = build_condition_rows(env, 0.05 - 1e-4j)
    assert [(r.kind, r.interface) for r in rows] == [
        ("surface", None),
        ("pressure_continuity", 0),
        ("source_jump", 0),
        ("pressure_continuity", 1),
        ("velocity_continuity", 1),
        ("bottom", None),
    ]
    # pressure continuity weights each side by the density across the interface
    pressure = rows[3].row
    offsets = DepthSolver(env).block_offsets
    assert pressure[offsets[2]] == pytest.approx(1.8 * 1.0)
    assert pressure[offsets[1]] == pytest.approx(-1.0 * 1.0)


def test_continuity_rows_vanish_on_smooth_function(rigid_env: Environment) -> None:
    x = _coefficients_of(rigid_env, lambda z: np.cos(0.03 * z) + 0.01 * z)
    rows = build_condition_rows(rigid_env, 0.05 - 1e-4j)
    for row in rows:
        if row.kind in ("pressure_continuity", "source_jump"):
            assert abs(row.row @ x) < 1e-10


def test_rigid_bottom_row_annihilates_cosine(rigid_env: Environment) -> None:
    kz = 1.5 * np.pi / 100.0
    x = _coefficients_of(rigid_env, lambda z: np.cos(kz * (100.0 - z)))
    bottom = build_condition_rows(rigid_env, 0.05 - 1e-4j)[-1]
    assert bottom.kind == "bottom"
    assert abs(bottom.row @ x) < 1e-8


def test_missing_source_interface_raises() -> None:
    with pytest.raises(MissingSourceInterfaceError):
        DepthSolver(_ideal(BottomCondition("rigid")))


def test_free_free_matches_closed_form() -> None:
    env = insert_source_interface(_ideal(BottomCondition("pressure_release"), order=20))
    kr = 0.06 - 1e-4j
    depths = np.array([0.0, 10.0, 36.0, 50.0, 99.9, 100.0])
    psi = solve_depth(env, kr, depths)
    kz = np.sqrt(K0 * K0 - kr * kr)
    amplitude = 1.0 / (2.0 * np.pi * kz * np.sin(kz * 100.0))
    shallow, deep = np.minimum(depths, 36.0), np.maximum(depths, 36.0)
    exact = amplitude * np.sin(kz * shallow) * np.sin(kz * (100.0 - deep))
    scale = np.max(np.abs(exact))
    assert np.max(np.abs(psi - exact)) / scale < 1e-6
    assert abs(psi[0]) < 1e-10 * scale



def test_refinement_error_decays_with_order() -> None:
    # smooth non-polynomial profile; each doubling of N must shrink the change tenfold until round-off
    depths = np.linspace(0.0, 100.0, 41)
    kr = 0.14 - 1e-4j
    solutions = [
        solve_depth(insert_source_interface(pseudolinear_waveguide("rigid", order=n).environment), kr, depths)
        for n in (12, 24, 48, 96)
    ]
    scale = float(np.max(np.abs(solutions[-1])))
    changes = [float(np.max(np.abs(fine - coarse))) for coarse, fine in zip(solutions, solutions[1:])]
    for coarse, fine in zip(changes, changes[1:]):
        assert fine <= max(0.1 * coarse, 1e-6 * scale)

def test_interface_depth_reads_layer_above(free_env: Environment) -> None:
    solver = DepthSolver(free_env)
    receivers = solver.receiver_map([36.0, 36.0 + 1e-9, 80.0])
    owners = {index: tuple(positions) for index, positions, _ in receivers.groups}
    assert owners == {0: (0,), 1: (1, 2)}
    psi = solver.solve(0.06 - 1e-4j, receivers)
    assert psi[0] == pytest.approx(psi[1], rel=1e-6)


@pytest.mark.edge
def test_receiver_outside_column_rejected(free_env: Environment) -> None:
    with pytest.raises(ValueError):
        solve_depth(free_env, 0.06 - 1e-4j, [101.0])


def test_condition_residuals_small(free_env: Environment, pekeris_env: Environment) -> None:
    rng = np.random.default_rng(3)
    for env in (free_env, pekeris_env):
        solver = DepthSolver(env)
        for k in rng.uniform(0.0, 2.0 * K0, 10):
            kr = complex(k - 9e-5j)
            report = condition_residuals(solver, kr, solver.solve_coefficients(kr))
            assert len(report) == 4
            assert max(residual for _, _, residual in report) < 1e-6


def test_point_and_line_depth_solutions_identical() -> None:
    kr = 0.07 - 2e-4j
    point = solve_depth(insert_source_interface(_ideal(BottomCondition("rigid"))), kr, [10.0, 46.0])
    line = solve_depth(insert_source_interface(_ideal(BottomCondition("rigid"), geometry="line")), kr, [10.0, 46.0])
    assert np.array_equal(point, line)


def test_solve_complex_linear_system_random() -> None:
    rng = np.random.default_rng(11)
    a = rng.normal(size=(50, 50)) + 1j * rng.normal(size=(50, 50))
    x = rng.normal(size=50) + 1j * rng.normal(size=50)
    solved = solve_complex_linear_system(a, a @ x)
    assert np.max(np.abs(solved - x)) < 1e-10
    assert solve_complex_linear_system(np.eye(3), [1.0, 2.0, 3.0]) == pytest.approx([1.0, 2.0, 3.0])


@pytest.mark.edge
def test_solve_complex_linear_system_failures() -> None:
    with pytest.raises(ValueError):
        solve_complex_linear_system(np.zeros((2, 3)), [1.0, 2.0])
    with pytest.raises(ValueError):
        solve_complex_linear_system(np.eye(3), [1.0, 2.0])
    with pytest.raises(SingularSystemError) as info:
        solve_complex_linear_system(np.zeros((3, 3)), [1.0, 0.0, 0.0], wavenumber=0.05 - 1e-4j)
    assert info.value.wavenumber == 0.05 - 1e-4j
