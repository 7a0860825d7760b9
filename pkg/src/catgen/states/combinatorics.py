"""Overflow-safe factorials and binomials.

Exact integer arithmetic is used up to EXACT_FACTORIAL_LIMIT; above it the
values are formed from scipy's log-gamma so ratios like (m+n)!/sqrt(n!) stay
finite well past n = 170.
"""

import math

import numpy as np
from scipy.special import gammaln

from config.constants import EXACT_FACTORIAL_LIMIT


def log_factorial(n: int) -> float:
    if n < 0:
        raise ValueError(f"log_factorial of negative argument {n}")
    if n <= EXACT_FACTORIAL_LIMIT:
        return math.log(math.factorial(n))
    return float(gammaln(n + 1))


def log_factorials(n_max: int) -> np.ndarray:
    """Vector of log(n!) for n = 0..n_max."""
    return gammaln(np.arange(n_max + 1, dtype=float) + 1.0)


def log_binomial(n: int, k: int) -> float:
    """log C(n, k); -inf outside 0 <= k <= n."""
    if k < 0 or k > n:
        return -math.inf
    if n <= EXACT_FACTORIAL_LIMIT:
        return math.log(math.comb(n, k))
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def binomial(n: int, k: int) -> float:
    if k < 0 or k > n:
        return 0.0
    if n <= EXACT_FACTORIAL_LIMIT:
        return float(math.comb(n, k))
    return math.exp(log_binomial(n, k))


def falling_sqrt_ratio(n: int, times: int) -> float:
    """sqrt(n! / (n - times)!), the ladder factor for annihilating `times` photons."""
    if times > n:
        return 0.0
    if n <= EXACT_FACTORIAL_LIMIT:
        return math.sqrt(math.factorial(n) / math.factorial(n - times))
    return math.exp(0.5 * (log_factorial(n) - log_factorial(n - times)))
