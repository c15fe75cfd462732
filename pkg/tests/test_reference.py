"""Tests for the analytic oracles: ideal-waveguide modes and field, profiles, TL error and peak extraction."""

import numpy as np
import pytest

from tauwave.reference import (
    TL_CLAMP_DB,
    ideal_field,
    ideal_modes,
    munk_profile,
    pseudolinear_profile,
    spectrum_peaks,
    tl_clamped,
    tl_error,
)


K0 = 2.0 * np.pi * 20.0 / 1500.0


@pytest.fixture
def ranges() -> np.ndarray:
    return np.linspace(200.0, 3000.0, 57)


@pytest.fixture
def depths() -> np.ndarray:
    return np.linspace(0.0, 100.0, 21)


def test_ideal_modes_free() -> None:
    modes = ideal_modes(100.0, K0, "free")
    assert len(modes) == 2
    assert modes.wavenumbers == pytest.approx((0.0776623, 0.0554125), abs=1e-7)
    assert modes.vertical_wavenumbers == pytest.approx((np.pi / 100.0, 2.0 * np.pi / 100.0))
    assert modes.seabed == "free"


def test_ideal_modes_rigid() -> None:
    modes = ideal_modes(100.0, K0, "rigid")
    assert modes.wavenumbers == pytest.approx((0.082290, 0.069266, 0.029153), abs=1e-6)
    closed_form = [np.sqrt(K0**2 - ((n - 0.5) * np.pi / 100.0) ** 2) for n in (1, 2, 3)]
    assert modes.wavenumbers == pytest.approx(closed_form, rel=1e-12)


@pytest.mark.edge
def test_ideal_modes_below_cutoff_and_invalid() -> None:
    assert len(ideal_modes(100.0, 0.01, "free")) == 0
    with pytest.raises(ValueError):
        ideal_modes(0.0, K0, "free")
    with pytest.raises(ValueError):
        ideal_modes(100.0, -1.0, "rigid")


def test_ideal_field_surface_null_and_bottom_clamp(ranges: np.ndarray, depths: np.ndarray) -> None:
    free = ideal_field(100.0, K0, 36.0, "free", ranges, depths, 50)
    assert free.shape == (57, 21)
    assert np.all(np.isinf(free[:, 0]))
    assert np.all(tl_clamped(free[:, -1]))
    assert np.all(np.isfinite(free[:, 1:-1]))


@pytest.mark.edge
def test_ideal_field_skips_mode_at_cutoff(ranges: np.ndarray) -> None:
    # k equals the first free vertical wavenumber, so mode 1 has k_r = 0
    tl = ideal_field(100.0, np.pi / 100.0, 36.0, "free", ranges, [20.0, 70.0], 3)
    assert np.all(np.isfinite(tl))


def test_ideal_field_reciprocity(ranges: np.ndarray) -> None:
    a = ideal_field(100.0, K0, 36.0, "rigid", ranges, [70.0], 50)
    b = ideal_field(100.0, K0, 70.0, "rigid", ranges, [36.0], 50)
    assert a == pytest.approx(b, abs=1e-9)


def test_ideal_field_converges_in_mode_count(ranges: np.ndarray, depths: np.ndarray) -> None:
    coarse = ideal_field(100.0, K0, 36.0, "free", ranges, depths, 50)
    fine = ideal_field(100.0, K0, 36.0, "free", ranges, depths, 100)
    assert tl_error(coarse, fine).error_db < 0.01


@pytest.mark.edge
def test_ideal_field_validation(depths: np.ndarray) -> None:
    with pytest.raises(ValueError):
        ideal_field(100.0, K0, 36.0, "free", [0.5, 10.0], depths, 50)
    with pytest.raises(ValueError):
        ideal_field(100.0, K0, 36.0, "rigid", [10.0], depths, 2)


def test_munk_profile_values() -> None:
    assert munk_profile(0.0) == pytest.approx(1548.52, abs=0.01)
    assert munk_profile(1300.0) == pytest.approx(1500.0)
    assert float(munk_profile(1300.0)) == float(np.min(munk_profile(np.linspace(0.0, 5000.0, 5001))))


def test_pseudolinear_profile_values() -> None:
    assert pseudolinear_profile([0.0, 100.0], 5.94e-10, 4.16e-7) == pytest.approx([1550.4, 1450.3], abs=0.05)
    with pytest.raises(ValueError):
        pseudolinear_profile([0.0, 1000.0], -5e-10, 4.16e-7)


def test_tl_error_excludes_clamped_points() -> None:
    a = np.array([[50.0, 60.0, np.inf], [70.0, TL_CLAMP_DB, 80.0]])
    b = np.array([[51.0, 58.0, 40.0], [70.5, 90.0, 80.0]])
    comparison = tl_error(a, b)
    assert comparison.compared == 4
    assert comparison.excluded == 2
    assert comparison.error_db == pytest.approx((1.0 + 2.0 + 0.5 + 0.0) / 4.0)


@pytest.mark.edge
def test_tl_error_shape_mismatch_and_empty() -> None:
    with pytest.raises(ValueError):
        tl_error(np.zeros((2, 2)), np.zeros((2, 3)))
    empty = tl_error(np.full((1, 2), np.inf), np.zeros((1, 2)))
    assert empty.compared == 0 and empty.error_db == 0.0


def test_spectrum_peaks_refines_parabola() -> None:
    k = np.linspace(0.0, 1.0, 101)
    spectrum = np.exp(-((k - 0.4137) ** 2) / 0.002) + 0.6 * np.exp(-((k - 0.7) ** 2) / 0.002)
    peaks = spectrum_peaks(spectrum, k)
    assert len(peaks) == 2
    assert peaks[0] == pytest.approx(0.7, abs=1e-9)
    assert peaks[1] == pytest.approx(0.4137, abs=1e-9)


def test_spectrum_peaks_threshold() -> None:
    k = np.linspace(0.0, 1.0, 101)
    spectrum = np.exp(-((k - 0.3) ** 2) / 0.002) + 0.3 * np.exp(-((k - 0.7) ** 2) / 0.002)
    assert len(spectrum_peaks(spectrum, k)) == 1
    assert len(spectrum_peaks(spectrum, k, threshold_fraction=0.1)) == 2


@pytest.mark.edge
def test_spectrum_peaks_edge_cases() -> None:
    assert spectrum_peaks(np.linspace(0.0, 1.0, 10), np.linspace(0.0, 1.0, 10)) == ()
    assert spectrum_peaks([1.0, 2.0], [0.0, 1.0]) == ()
    with pytest.raises(ValueError):
        spectrum_peaks([], [])
    with pytest.raises(ValueError):
        spectrum_peaks([1.0, 2.0, 1.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        spectrum_peaks([1.0, np.nan, 1.0], [0.0, 1.0, 2.0])
