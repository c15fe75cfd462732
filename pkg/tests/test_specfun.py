"""Tests for the Bessel and Hankel functions, checked against scipy.special."""

import numpy as np
import pytest
from scipy import special

from tauwave.specfun import (
    MAX_IMAG_ARGUMENT,
    bessel_j0,
    bessel_j0_complex,
    bessel_y0,
    hankel1_0,
    hankel1_0_imaginary,
)


@pytest.fixture
def real_arguments() -> np.ndarray:
    return np.concatenate([np.linspace(0.01, 11.9, 60), [12.0, 12.1], np.linspace(12.5, 5000.0, 80)])


@pytest.fixture
def complex_arguments() -> np.ndarray:
    rng = np.random.default_rng(7)
    real = rng.uniform(-400.0, 400.0, 200)
    imag = rng.uniform(-MAX_IMAG_ARGUMENT, MAX_IMAG_ARGUMENT, 200)
    near_crossover = 12.0 * np.exp(1j * np.linspace(-0.8, 0.8, 9))
    return np.concatenate([real + 1j * imag, near_crossover, [0.0 + 0.0j, 1e-3 - 1e-4j]])


def test_j0_complex_matches_scipy(complex_arguments: np.ndarray) -> None:
    ours = bessel_j0_complex(complex_arguments)
    reference = special.jv(0, complex_arguments)
    scale = np.maximum(np.abs(reference), 1.0)
    assert np.max(np.abs(ours - reference) / scale) < 1e-9


def test_j0_complex_scalar() -> None:
    value = bessel_j0_complex(2.5 - 0.3j)
    assert isinstance(value, complex)
    assert value == pytest.approx(complex(special.jv(0, 2.5 - 0.3j)), rel=1e-12)
    assert bessel_j0_complex(0.0) == pytest.approx(1.0)


def test_j0_is_even() -> None:
    z = np.array([3.0 - 2.0j, 40.0 + 1.0j, 0.5 + 0.1j])
    assert bessel_j0_complex(-z) == pytest.approx(bessel_j0_complex(z), rel=1e-13)


@pytest.mark.edge
def test_j0_complex_guard() -> None:
    with pytest.raises(ValueError):
        bessel_j0_complex(5.0 + 10.5j)
    with pytest.raises(ValueError):
        bessel_j0_complex(np.array([1.0, np.nan]))
    # exactly at the limit is accepted
    assert np.isfinite(bessel_j0_complex(5.0 + 10.0j))


def test_real_j0_y0_match_scipy(real_arguments: np.ndarray) -> None:
    assert bessel_j0(real_arguments) == pytest.approx(special.j0(real_arguments), abs=1e-10)
    assert bessel_y0(real_arguments) == pytest.approx(special.y0(real_arguments), abs=1e-10)


def test_hankel_matches_scipy(real_arguments: np.ndarray) -> None:
    ours = hankel1_0(real_arguments)
    assert ours == pytest.approx(special.hankel1(0, real_arguments), abs=1e-10)


def test_hankel_scalar() -> None:
    value = hankel1_0(1.0)
    assert isinstance(value, complex)
    assert value == pytest.approx(complex(special.hankel1(0, 1.0)), rel=1e-11)


@pytest.mark.edge
def test_y0_and_hankel_reject_non_positive() -> None:
    with pytest.raises(ValueError):
        bessel_y0(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        hankel1_0(-2.0)


def test_hankel_imaginary_argument() -> None:
    y = np.array([0.05, 1.0, 30.0, 800.0])
    expected = special.hankel1(0, 1j * y)
    ours = hankel1_0_imaginary(y)
    assert ours[:3] == pytest.approx(expected[:3], rel=1e-10)
    # far evanescent tail underflows to zero without overflow warnings
    assert abs(ours[3]) < 1e-300
