"""Phase-space representations computed directly from a truncated density matrix.

None of these use closed forms, which makes them the reference the analytic
module is checked against. Conventions match squeezed_cats: vacuum quadrature
variance 1/2, rotated quadratures from c_n -> c_n exp(-i n phi), and
Q = <alpha|rho|alpha> / (2 pi) with alpha = (x + i p) / sqrt(2).
"""

import math
from typing import Union

import numpy as np

from src.catgen.states.fock_space import FockVector, StateLike, as_density

ArrayLike = Union[float, np.ndarray]


def _matrix(state: StateLike) -> np.ndarray:
    rho = as_density(state)
    if rho.modes != 1:
        raise ValueError("Phase-space transforms expect a single-mode state")
    if isinstance(state, FockVector):
        return rho.normalized().entries
    return rho.entries


def _scalar_or_array(values: np.ndarray) -> ArrayLike:
    return float(values) if values.ndim == 0 else values


def oscillator_functions(n_max: int, x: ArrayLike) -> np.ndarray:
    """<x|n> for n = 0..n_max, shape (n_max + 1,) + shape(x).

    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}, which stays
    bounded where H_n(x) exp(-x^2/2) would overflow.
    """
    x = np.asarray(x, dtype=float)
    psi = np.empty((n_max + 1,) + x.shape)
    psi[0] = math.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        psi[1] = math.sqrt(2.0) * x * psi[0]
    for n in range(1, n_max):
        psi[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * x * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
        )
    return psi


def quad_dist_numeric(state: StateLike, x: ArrayLike, phi: float) -> ArrayLike:
    """sum_{n,n'} rho_{n,n'} exp(-i(n-n')phi) <x|n><n'|x>."""
    rho = _matrix(state)
    x = np.asarray(x, dtype=float)
    n = np.arange(rho.shape[0])
    psi = oscillator_functions(rho.shape[0] - 1, x)
    rotated = np.exp(-1j * n * phi).reshape((-1,) + (1,) * x.ndim) * psi
    values = np.real(np.einsum("n...,nm,m...->...", rotated, rho, rotated.conj()))
    return _scalar_or_array(values)


def _laguerre_series(coefficients: np.ndarray, order: int, b: np.ndarray) -> np.ndarray:
    """Clenshaw sum of c_k f_k(b) over normalized Laguerre functions

        f_k = (-1)^k sqrt(k! L! / (k+L)!) L_k^(L)(b),
        f_{k+1} = alpha_k f_k + beta_k f_{k-1},
        alpha_k = -(2k+1+L-b) / sqrt((k+1)(k+1+L)),
        beta_k = -sqrt(k(k+L) / ((k+1)(k+1+L))).
    """
    size = coefficients.size

    def alpha(k):
        return -(2 * k + 1 + order - b) / math.sqrt((k + 1) * (k + 1 + order))

    def beta(k):
        return -math.sqrt(k * (k + order) / ((k + 1) * (k + 1 + order)))

    f0 = np.ones_like(b)
    if size == 1:
        return coefficients[0] * f0
    f1 = -(1 + order - b) / math.sqrt(1 + order)
    b1 = np.zeros_like(b, dtype=complex)
    b2 = np.zeros_like(b, dtype=complex)
    for k in range(size - 1, 0, -1):
        b1, b2 = coefficients[k] + alpha(k) * b1 + beta(k + 1) * b2, b1
    return coefficients[0] * f0 + f1 * b1 + beta(1) * f0 * b2


def wigner_numeric(state: StateLike, x: ArrayLike, p: ArrayLike) -> ArrayLike:
    """Wigner function from Laguerre matrix elements.

    W = exp(-B/2)/pi Re sum_L A^L / sqrt(L!) sum_k (2 - delta_L0) rho_{k,k+L} f_k^L(B)
    with A = sqrt(2)(x + ip) and B = |A|^2. The inner sums run by Clenshaw
    recurrence along each diagonal and the outer sum in Horner form over L.
    """
    rho = _matrix(state)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    a = math.sqrt(2.0) * (x + 1j * p)
    b = np.abs(a) ** 2
    size = rho.shape[0]

    accumulated = np.zeros(b.shape, dtype=complex)
    for order in range(size - 1, -1, -1):
        diagonal = np.diagonal(rho, offset=order) * (1.0 if order == 0 else 2.0)
        series = _laguerre_series(diagonal, order, b)
        accumulated = series + a / math.sqrt(order + 1) * accumulated
    values = np.exp(-0.5 * b) / math.pi * np.real(accumulated)
    return _scalar_or_array(values)


def husimi_numeric(state: StateLike, x: ArrayLike, p: ArrayLike) -> ArrayLike:
    """Q(x, p) = <alpha|rho|alpha> / (2 pi); the vacuum peak is 1/(2 pi)."""
    rho = _matrix(state)
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    alpha = (x + 1j * p) / math.sqrt(2.0)
    size = rho.shape[0]
    # alpha^n / sqrt(n!) built up by ratios
    powers = np.empty((size,) + alpha.shape, dtype=complex)
    powers[0] = 1.0
    for n in range(1, size):
        powers[n] = powers[n - 1] * alpha / math.sqrt(n)
    overlap = np.einsum("n...,nm,m...->...", powers.conj(), rho, powers)
    values = np.exp(-np.abs(alpha) ** 2) * np.real(overlap) / (2.0 * math.pi)
    return _scalar_or_array(values)
