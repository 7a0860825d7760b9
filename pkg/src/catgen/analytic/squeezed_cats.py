"""Closed forms for photon-added and photon-subtracted squeezed vacuum.

A squeezed vacuum with parameter kappa passes a beam splitter with
transmittance T; all output-state quantities depend on kappa' = T^2 kappa.
Phase-space conventions: quadratures x, p with vacuum variance 1/2, rotated
quadrature distributions use c_n -> c_n exp(-i n phi), and the Husimi function
is Q(x, p) = <alpha|rho|alpha> / (2 pi) with alpha = (x + i p) / sqrt(2), so
that Q integrates to 1 over dx dp.
"""

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Union

import numpy as np
from scipy.special import eval_laguerre, logsumexp

from config.constants import (
    ERROR_DELTA_DOMAIN,
    ERROR_KAPPA_DOMAIN,
    ERROR_NEGATIVE_COUNT,
    FOCK_FALLBACK_KAPPA,
    IMAGINARY_RESIDUE_TOLERANCE,
    LOG_SPACE_COEFF_LIMIT,
    MAX_AUTO_N_MAX,
    SQUEEZE_TAIL_TOLERANCE,
)
from src.catgen.analytic.special_functions import gauss_2f1, hermite
from src.catgen.states.combinatorics import binomial, log_factorial
from src.catgen.states.fock_space import (
    FockVector,
    KappaLike,
    SqueezeParam,
    canonical_phase,
    normalize,
)
from src.catgen.states.fock_space import mean_photon_number as fock_mean_photon_number
from src.catgen.utils.errors import DomainError, ToleranceError

ArrayLike = Union[float, np.ndarray]


class CatKind(str, Enum):
    ADDED = "added"
    SUBTRACTED = "subtracted"


@dataclass(frozen=True)
class CatParams:
    """Conditional output of a squeezed vacuum: kappa' = T^2 kappa and the
    number of photons added (n0) or subtracted (m)."""

    kappa_prime: complex
    count: int
    mode: CatKind

    def __post_init__(self):
        kappa = complex(self.kappa_prime)
        if not abs(kappa) < 1.0:
            raise DomainError(f"{ERROR_KAPPA_DOMAIN} (got |kappa'|={abs(kappa):.6g})")
        if self.count < 0:
            raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got {self.count})")
        object.__setattr__(self, "kappa_prime", kappa)
        object.__setattr__(self, "mode", CatKind(self.mode))

    @property
    def lam(self) -> complex:
        """lambda = (1 - kappa') / (1 + kappa'); Re(lambda) > 0 for |kappa'| < 1."""
        return (1.0 - self.kappa_prime) / (1.0 + self.kappa_prime)

    @property
    def is_fock_limit(self) -> bool:
        return abs(self.kappa_prime) < FOCK_FALLBACK_KAPPA

    @property
    def fock_limit(self) -> int:
        """Fock state reached as kappa' -> 0: |n0> (added) or |m mod 2> (subtracted)."""
        if self.mode is CatKind.ADDED:
            return self.count
        return self.count % 2


@dataclass(frozen=True)
class PhasePoint:
    x: float
    p: float = 0.0
    phi: float = 0.0


def kappa_prime(kappa: KappaLike, transmittance: complex) -> complex:
    if isinstance(kappa, SqueezeParam):
        return kappa.attenuated(transmittance).kappa
    return SqueezeParam(kappa).attenuated(transmittance).kappa


def _check_magnitude(magnitude: float):
    if not 0.0 <= magnitude < 1.0:
        raise DomainError(f"{ERROR_KAPPA_DOMAIN} (got |kappa'|={magnitude:.6g})")


def _log_power(base: float, exponent: int) -> float:
    if exponent == 0:
        return 0.0
    if base == 0.0:
        return -math.inf
    return exponent * math.log(base)


def _log_sum(log_terms) -> float:
    finite = [t for t in log_terms if t > -math.inf]
    if not finite:
        return -math.inf
    return float(logsumexp(finite))


# Coefficients and normalizations


def _scaled_power(kappa: complex, j: int, log_magnitude: float) -> complex:
    """exp(log_magnitude) * (kappa/2)^j, magnitude in log space."""
    if j == 0:
        return complex(math.exp(log_magnitude))
    if kappa == 0:
        return 0j
    log_total = log_magnitude + j * math.log(abs(kappa) / 2.0)
    return cmath.rect(math.exp(log_total), j * cmath.phase(kappa))


def coeff_added(n: int, n0: int, kappa_prime: complex) -> complex:
    """c_{n,n0,0} = sqrt(n!) / j! (kappa'/2)^j for n = n0 + 2j, zero otherwise."""
    if n < n0 or (n - n0) % 2:
        return 0j
    j = (n - n0) // 2
    kappa = complex(kappa_prime)
    if n <= LOG_SPACE_COEFF_LIMIT:
        return math.sqrt(math.factorial(n)) / math.factorial(j) * (kappa / 2.0) ** j
    return _scaled_power(kappa, j, 0.5 * log_factorial(n) - log_factorial(j))


def coeff_subtracted(n: int, m: int, kappa_prime: complex) -> complex:
    """c_{n,0,m} = (2j)! / (j! sqrt(n!)) (kappa'/2)^j for n + m = 2j, zero otherwise."""
    if n < 0 or (n + m) % 2:
        return 0j
    j = (n + m) // 2
    kappa = complex(kappa_prime)
    if n <= LOG_SPACE_COEFF_LIMIT and m <= LOG_SPACE_COEFF_LIMIT:
        return (
            math.factorial(2 * j)
            / (math.factorial(j) * math.sqrt(math.factorial(n)))
            * (kappa / 2.0) ** j
        )
    return _scaled_power(
        kappa, j, log_factorial(2 * j) - log_factorial(j) - 0.5 * log_factorial(n)
    )


def norm_added(n0: int, magnitude: float) -> float:
    """N_{n0,0} = n0! F((n0+1)/2, (n0+2)/2, 1; |kappa'|^2)."""
    _check_magnitude(magnitude)
    hypergeometric = gauss_2f1(0.5 * (n0 + 1), 0.5 * (n0 + 2), 1.0, magnitude**2)
    return math.factorial(n0) * hypergeometric


def norm_subtracted(m: int, magnitude: float) -> float:
    """N_{0,m} = (1-z)^(-m-1/2) sum_k (m!)^2 / ((m-2k)! k!^2) 4^-k |kappa'|^(2m-2k).

    Written with |kappa'|^(2m-2k) instead of |kappa'|^2m (2|kappa'|)^-2k so the
    kappa' -> 0 limit is finite: 1 for m = 0 and 0 otherwise.
    """
    _check_magnitude(magnitude)
    z = magnitude**2
    log_terms = [
        2.0 * log_factorial(m)
        - log_factorial(m - 2 * k)
        - 2.0 * log_factorial(k)
        - k * math.log(4.0)
        + _log_power(magnitude, 2 * (m - k))
        for k in range(m // 2 + 1)
    ]
    total = _log_sum(log_terms)
    if total == -math.inf:
        return 0.0
    return math.exp(total - (m + 0.5) * math.log1p(-z))


# Production probabilities


def prob_added(
    n0: int, kappa: KappaLike, transmittance: complex, reflectance: complex
) -> float:
    """P(n0) = |R|^(2 n0) sqrt(1-|kappa|^2) F((n0+1)/2, (n0+2)/2, 1; |kappa'|^2).

    Agrees with the photon-number sum over the squeezed-vacuum diagonal; the
    F(n0+1, 1/2, 1; z) variant coincides only at n0 = 0.
    """
    if n0 < 0:
        raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got {n0})")
    kappa = SqueezeParam(kappa) if not isinstance(kappa, SqueezeParam) else kappa
    z = abs(kappa_prime(kappa, transmittance)) ** 2
    hypergeometric = gauss_2f1(0.5 * (n0 + 1), 0.5 * (n0 + 2), 1.0, z)
    survival = math.sqrt(1.0 - kappa.magnitude**2)
    return abs(reflectance) ** (2 * n0) * survival * hypergeometric


def prob_subtracted(
    m: int, kappa: KappaLike, transmittance: complex, reflectance: complex
) -> float:
    """P(m) = |R|^2m sqrt(1-|kappa|^2) (1-z)^(-m-1/2)
    sum_k m! / ((m-2k)! k!^2) 4^-k |T|^(2(m-2k)) |kappa|^(2(m-k)), z = |kappa'|^2.

    Equal to |R|^2m |T|^-2m sqrt(1-|kappa|^2) N_{0,m} / m!, summed without
    dividing by |T| so full reflection stays finite.
    """
    if m < 0:
        raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got {m})")
    kappa = SqueezeParam(kappa) if not isinstance(kappa, SqueezeParam) else kappa
    magnitude = kappa.magnitude
    t = abs(transmittance)
    z = (t * t * magnitude) ** 2
    log_terms = [
        log_factorial(m)
        - log_factorial(m - 2 * k)
        - 2.0 * log_factorial(k)
        - k * math.log(4.0)
        + _log_power(t, 2 * (m - 2 * k))
        + _log_power(magnitude, 2 * (m - k))
        for k in range(m // 2 + 1)
    ]
    total = _log_sum(log_terms)
    if total == -math.inf:
        return 0.0
    log_prefactor = (
        _log_power(abs(reflectance), 2 * m)
        + 0.5 * math.log1p(-magnitude**2)
        - (m + 0.5) * math.log1p(-z)
    )
    return math.exp(total + log_prefactor)


# States


def required_n_max(params: CatParams, tolerance: float = SQUEEZE_TAIL_TOLERANCE) -> int:
    """Smallest truncation whose coefficient mass reaches 1 - tolerance of the norm."""
    if params.is_fock_limit:
        return params.fock_limit
    magnitude = abs(params.kappa_prime)
    if params.mode is CatKind.ADDED:
        norm, coeff = norm_added(params.count, magnitude), coeff_added
    else:
        norm, coeff = norm_subtracted(params.count, magnitude), coeff_subtracted
    captured = 0.0
    for n in range(MAX_AUTO_N_MAX + 1):
        captured += abs(coeff(n, params.count, params.kappa_prime)) ** 2
        if 1.0 - captured / norm < tolerance:
            return n
    raise DomainError(
        f"{ERROR_KAPPA_DOMAIN}: |kappa'|={magnitude:.6g} needs n_max > {MAX_AUTO_N_MAX}"
    )


def cat_state(params: CatParams, n_max: Optional[int] = None) -> FockVector:
    """Normalized conditional output state from the closed-form coefficients."""
    if n_max is None:
        n_max = required_n_max(params)
    if params.is_fock_limit:
        amplitudes = np.zeros(n_max + 1, dtype=complex)
        if params.fock_limit <= n_max:
            amplitudes[params.fock_limit] = 1.0
        return FockVector(amplitudes)
    coeff = coeff_added if params.mode is CatKind.ADDED else coeff_subtracted
    amplitudes = [coeff(n, params.count, params.kappa_prime) for n in range(n_max + 1)]
    return canonical_phase(normalize(FockVector(np.asarray(amplitudes, dtype=complex))))


def mean_photon_number(params: CatParams) -> float:
    return fock_mean_photon_number(cat_state(params))


def squeezed_quadrature_variance(kappa_prime: complex, phi: float) -> float:
    """Variance Delta / (2 (1 - |kappa'|^2)) of the rotated quadrature x_phi."""
    kappa = complex(kappa_prime)
    _check_magnitude(abs(kappa))
    return _delta(kappa, phi) / (2.0 * (1.0 - abs(kappa) ** 2))


# Phase-space representations


def _delta(kappa: complex, phi: float) -> float:
    """Delta = 1 + |kappa'|^2 + 2 |kappa'| cos(2 phi - phi_kappa'), i.e.
    |1 + kappa' exp(-2i phi)|^2."""
    delta = abs(1.0 + kappa * cmath.exp(-2j * phi)) ** 2
    if delta <= 0.0:
        raise DomainError(f"{ERROR_DELTA_DOMAIN} (got {delta:.3e})")
    return delta


def _fock_quadrature(n: int, x: np.ndarray) -> np.ndarray:
    scale = 1.0 / (math.sqrt(math.pi) * 2.0**n * math.factorial(n))
    return scale * hermite(n, x) ** 2 * np.exp(-(x**2))


def _fock_wigner(n: int, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    r2 = x**2 + p**2
    return (-1) ** n / math.pi * np.exp(-r2) * eval_laguerre(n, 2.0 * r2)


def _fock_husimi(n: int, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    a2 = 0.5 * (x**2 + p**2)
    return a2**n * np.exp(-a2) / (2.0 * math.pi * math.factorial(n))


def _real_part(values: np.ndarray, label: str) -> np.ndarray:
    residue = float(np.max(np.abs(np.imag(values)), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(np.real(values)), initial=0.0)))
    if residue > IMAGINARY_RESIDUE_TOLERANCE * scale:
        raise ToleranceError(
            f"{label} has imaginary residue {residue:.3e}",
            {"imaginary_residue": residue},
        )
    return np.real(values)


def _phase_arrays(x: ArrayLike, p: ArrayLike):
    return np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))


def _scalar_or_array(values: np.ndarray) -> ArrayLike:
    return float(values) if values.ndim == 0 else values


def quad_dist(params: CatParams, x: ArrayLike, phi: float) -> ArrayLike:
    """Probability density of the rotated quadrature x_phi."""
    x = np.asarray(x, dtype=float)
    if params.is_fock_limit:
        return _scalar_or_array(_fock_quadrature(params.fock_limit, x))
    kappa = params.kappa_prime
    magnitude = abs(kappa)
    z = magnitude**2
    count = params.count
    delta = _delta(kappa, phi)
    envelope = np.exp(-(1.0 - z) / delta * x**2)
    gaussian = math.sqrt(math.pi * delta ** (count + 1))
    rotated = kappa.conjugate() * cmath.exp(2j * phi)
    if params.mode is CatKind.ADDED:
        prefactor = 1.0 / (norm_added(count, magnitude) * gaussian * 2.0**count)
        argument = cmath.sqrt((1.0 + rotated) / delta) * x
    else:
        prefactor = magnitude**count / (
            norm_subtracted(count, magnitude) * gaussian * 2.0**count
        )
        argument = cmath.sqrt((-rotated - z) / delta) * x
    values = prefactor * envelope * np.abs(hermite(count, argument)) ** 2
    return _scalar_or_array(values)


def wigner(params: CatParams, x: ArrayLike, p: ArrayLike) -> ArrayLike:
    """Wigner function W(x, p), normalized to 1 over dx dp."""
    x, p = _phase_arrays(x, p)
    if params.is_fock_limit:
        return _scalar_or_array(_fock_wigner(params.fock_limit, x, p))
    kappa = params.kappa_prime
    magnitude = abs(kappa)
    count = params.count
    lam = params.lam
    lam_sum = lam + lam.conjugate()
    shifted = x + 1j * p / lam
    envelope = np.exp(-2.0 * abs(lam) ** 2 / lam_sum * np.abs(shifted) ** 2)

    if params.mode is CatKind.ADDED:
        norm = norm_added(count, magnitude)
        radicand = 2.0 * lam**2 * (1.0 + lam.conjugate()) / ((1.0 - lam) * lam_sum)
        # |kappa'|^count folded into (-2/|kappa'|)^k keeps small kappa' finite
        weights = [
            binomial(count, k) ** 2
            * math.factorial(k)
            * (-2.0) ** k
            * magnitude ** (count - k)
            for k in range(count + 1)
        ]
        prefactor = 1.0
    else:
        norm = norm_subtracted(count, magnitude)
        radicand = 2.0 * lam**2 * (1.0 - lam.conjugate()) / ((1.0 + lam) * lam_sum)
        weights = [
            binomial(count, k) ** 2 * math.factorial(k) * (-2.0 * magnitude) ** k
            for k in range(count + 1)
        ]
        prefactor = magnitude**count
    prefactor /= math.pi * norm * 2.0**count * abs(1.0 + kappa) ** (2 * count + 1)

    argument = 1j * cmath.sqrt(radicand) * shifted
    total = sum(
        weight * np.abs(hermite(count - k, argument)) ** 2
        for k, weight in enumerate(weights)
    )
    values = prefactor * (2.0 / lam_sum) ** (count + 0.5) * envelope * total
    return _scalar_or_array(_real_part(values, "Wigner function"))


def husimi(params: CatParams, x: ArrayLike, p: ArrayLike) -> ArrayLike:
    """Husimi function Q(x, p) = |<alpha|psi>|^2 / (2 pi), alpha = (x+ip)/sqrt(2)."""
    x, p = _phase_arrays(x, p)
    if params.is_fock_limit:
        return _scalar_or_array(_fock_husimi(params.fock_limit, x, p))
    kappa = params.kappa_prime
    magnitude = abs(kappa)
    count = params.count
    alpha = (x + 1j * p) / math.sqrt(2.0)
    a2 = np.abs(alpha) ** 2
    # (kappa'* alpha^2 + kappa' alpha*^2) / 2
    squeeze = np.real(kappa.conjugate() * alpha**2)
    if params.mode is CatKind.ADDED:
        norm = norm_added(count, magnitude)
        values = a2**count * np.exp(squeeze - a2) / (2.0 * math.pi * norm)
    else:
        argument = cmath.sqrt(-0.5 * kappa.conjugate()) * alpha
        values = (
            magnitude**count
            * np.exp(squeeze - a2)
            * np.abs(hermite(count, argument)) ** 2
            / (2.0 * math.pi * norm_subtracted(count, magnitude) * 2.0**count)
        )
    return _scalar_or_array(values)


def evaluate_at(params: CatParams, point: PhasePoint) -> Dict[str, float]:
    """All three representations at a single phase-space point."""
    return {
        "quadrature": quad_dist(params, point.x, point.phi),
        "wigner": wigner(params, point.x, point.p),
        "husimi": husimi(params, point.x, point.p),
    }
