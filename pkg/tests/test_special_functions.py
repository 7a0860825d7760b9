import math

import numpy as np
import pytest
from oracles import hermite_explicit
from scipy.special import eval_hermite, hyp2f1

from src.catgen.analytic import special_functions
from src.catgen.analytic.special_functions import gauss_2f1, hermite
from src.catgen.utils.errors import ConvergenceError, DomainError


@pytest.mark.parametrize("n", range(8))
def test_hermite_real_matches_scipy(n):
    x = np.linspace(-3, 3, 13)
    assert np.allclose(hermite(n, x), eval_hermite(n, x), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("n", [0, 1, 4, 7])
@pytest.mark.parametrize("z", [0.3 + 1.1j, -2.0 + 0.5j, 1j])
def test_hermite_complex_matches_explicit_sum(n, z):
    assert hermite(n, z) == pytest.approx(hermite_explicit(n, z), rel=1e-12)


def test_hermite_scalar_and_array_shapes():
    assert isinstance(hermite(3, 0.5), float)
    assert hermite(3, np.zeros((2, 3))).shape == (2, 3)
    assert hermite(0, 2.0) == 1.0
    with pytest.raises(DomainError):
        hermite(-1, 0.0)


@pytest.mark.parametrize(
    "n0, expected",
    [(0, 1.40028), (1, 2.745647), (2, 6.702609), (3, 18.314868), (4, 52.98833)],
)
def test_normalization_hypergeometrics(n0, expected):
    value = gauss_2f1(0.5 * (n0 + 1), 0.5 * (n0 + 2), 1.0, 0.49)
    assert value == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize(
    "a, b, c, z",
    [
        (0.5, 1.0, 1.0, 0.3),
        (1.5, 2.0, 1.0, 0.8),
        (2.5, 3.0, 1.0, 0.95),
        (0.25, 0.75, 2.5, 0.9),
        (-3.0, 1.5, 2.0, 0.99),
    ],
)
def test_gauss_2f1_matches_scipy(a, b, c, z):
    assert gauss_2f1(a, b, c, z) == pytest.approx(hyp2f1(a, b, c, z), rel=1e-10)


def test_closed_form_special_cases():
    value = gauss_2f1(0.5, 1.0, 1.0, 0.9)
    assert value == pytest.approx(1.0 / math.sqrt(0.1), rel=1e-12)
    # c - a - b = 0: the connection formula is singular, the series is used
    assert gauss_2f1(1.0, 1.0, 2.0, 0.9) == pytest.approx(
        -math.log(0.1) / 0.9, rel=1e-12
    )
    assert gauss_2f1(1.0, 2.0, 3.0, 0.0) == 1.0


def test_gauss_2f1_domain():
    with pytest.raises(DomainError):
        gauss_2f1(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        gauss_2f1(1.0, 1.0, -2.0, 0.5)
    with pytest.raises(DomainError):
        gauss_2f1(1.0, 1.0, 1.0, -0.1)


def test_series_budget_exhaustion(monkeypatch):
    monkeypatch.setattr(special_functions, "SERIES_MAX_TERMS", 5)
    with pytest.raises(ConvergenceError):
        gauss_2f1(0.5, 1.0, 1.0, 0.5)
