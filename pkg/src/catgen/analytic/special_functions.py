"""Hermite polynomials and the Gauss hypergeometric series."""

import math
from typing import Union

import numpy as np
from scipy.special import gamma, rgamma

from config.constants import (
    ERROR_NO_CONVERGENCE,
    HYPERGEOMETRIC_TRANSFORM_THRESHOLD,
    SERIES_MAX_TERMS,
    SERIES_RELATIVE_TOLERANCE,
)
from src.catgen.utils.errors import ConvergenceError, DomainError

ArrayLike = Union[complex, float, np.ndarray]


def hermite(n: int, z: ArrayLike) -> ArrayLike:
    """Physicists' Hermite polynomial H_n(z) by H_{k+1} = 2z H_k - 2k H_{k-1}.

    Works on scalars or arrays, real or complex; the result keeps the input
    dtype (promoted to at least float).
    """
    if n < 0:
        raise DomainError(f"Hermite degree must be >= 0 (got {n})")
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z.astype(float)
    previous = np.ones_like(z)
    if n == 0:
        return previous if previous.ndim else previous[()]
    current = 2.0 * z
    for k in range(1, n):
        previous, current = current, 2.0 * z * current - 2.0 * k * previous
    return current if current.ndim else current[()]


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def _series(a: float, b: float, c: float, z: float) -> float:
    """Direct sum, term ratio (a+k)(b+k) z / ((c+k)(k+1))."""
    term = 1.0
    total = 1.0
    for k in range(SERIES_MAX_TERMS):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        term *= ratio
        total += term
        if term == 0.0:
            return total
        if abs(term) <= SERIES_RELATIVE_TOLERANCE * abs(total) and abs(ratio) < 1.0:
            return total
    raise ConvergenceError(
        f"{ERROR_NO_CONVERGENCE}: 2F1({a}, {b}; {c}; {z}) "
        f"after {SERIES_MAX_TERMS} terms"
    )


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function F(a, b, c; z) for real 0 <= z < 1.

    Above HYPERGEOMETRIC_TRANSFORM_THRESHOLD the z -> 1 - z connection formula
    is used; when c - a - b is an integer that formula is singular and the
    direct series is summed instead.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"2F1 undefined for c = {c}")
    if not 0.0 <= z < 1.0:
        raise DomainError(f"2F1 argument must lie in [0, 1) (got {z})")
    if z == 0.0:
        return 1.0
    terminating = _is_nonpositive_integer(a) or _is_nonpositive_integer(b)
    excess = c - a - b
    if (
        z <= HYPERGEOMETRIC_TRANSFORM_THRESHOLD
        or terminating
        or float(excess).is_integer()
    ):
        return _series(a, b, c, z)

    w = 1.0 - z
    # rgamma is zero at poles, which drops a branch whose prefactor vanishes
    first = gamma(c) * gamma(excess) * rgamma(c - a) * rgamma(c - b)
    second = gamma(c) * gamma(-excess) * rgamma(a) * rgamma(b)
    value = first * _series(a, b, 1.0 - excess, w)
    value += math.pow(w, excess) * second * _series(c - a, c - b, 1.0 + excess, w)
    return float(value)
