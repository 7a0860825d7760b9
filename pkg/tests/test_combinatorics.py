import math

import numpy as np
import pytest

from src.catgen.states.combinatorics import (
    binomial,
    falling_sqrt_ratio,
    log_binomial,
    log_factorial,
    log_factorials,
)


def test_small_values_are_exact():
    assert binomial(5, 2) == 10.0
    assert log_factorial(20) == math.log(math.factorial(20))
    assert falling_sqrt_ratio(5, 2) == pytest.approx(math.sqrt(20))


@pytest.mark.parametrize("n, k", [(60, 30), (200, 7), (171, 85)])
def test_large_binomials_follow_integer_values(n, k):
    assert binomial(n, k) == pytest.approx(float(math.comb(n, k)), rel=1e-10)
    assert log_binomial(n, k) == pytest.approx(math.log(math.comb(n, k)), rel=1e-12)


def test_out_of_range_arguments():
    assert binomial(3, 4) == 0.0
    assert binomial(3, -1) == 0.0
    assert log_binomial(3, 4) == -math.inf
    assert falling_sqrt_ratio(2, 3) == 0.0
    with pytest.raises(ValueError):
        log_factorial(-1)


def test_no_overflow_past_170():
    value = falling_sqrt_ratio(400, 4)
    assert math.isfinite(value)
    assert value == pytest.approx(math.sqrt(400 * 399 * 398 * 397), rel=1e-10)
    assert log_factorial(1000) == pytest.approx(math.lgamma(1001), rel=1e-14)


def test_log_factorials_vector():
    values = log_factorials(30)
    expected = np.array([math.lgamma(n + 1) for n in range(31)])
    assert np.allclose(values, expected, rtol=1e-13, atol=1e-13)
