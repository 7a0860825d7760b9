"""Truncated Fock-space states and ladder-operator actions."""

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import sqrtm

from config.constants import (
    ERROR_FOCK_RANGE,
    ERROR_KAPPA_DOMAIN,
    ERROR_NEGATIVE_COUNT,
    ERROR_NOT_HERMITIAN,
    ERROR_SHAPE_MISMATCH,
    ERROR_ZERO_NORM,
    HERMITIAN_TOLERANCE,
    LADDER_TRUNCATION_TOLERANCE,
    MAX_AUTO_N_MAX,
    NORM_TOLERANCE,
    SQUEEZE_TAIL_TOLERANCE,
    TRUNCATION_HEADROOM,
)
from src.catgen.states.combinatorics import falling_sqrt_ratio
from src.catgen.utils.errors import (
    DomainError,
    TruncationError,
    TruncationWarning,
    ZeroNormError,
)


@dataclass(frozen=True, eq=False)
class FockVector:
    """Pure single-mode state: amplitudes c_0..c_{n_max}.

    tail_mass is the squared norm known to lie beyond n_max (zero unless the
    constructor could compute it, e.g. for squeezed vacuum).
    """

    amplitudes: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1 or amplitudes.size == 0:
            raise ValueError("FockVector needs a non-empty 1-d amplitude sequence")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared - 1.0) <= NORM_TOLERANCE

    def resized(self, n_max: int) -> "FockVector":
        """Zero-pad or cut to a new truncation; cutting warns if mass is lost."""
        if n_max == self.n_max:
            return self
        if n_max > self.n_max:
            padded = np.zeros(n_max + 1, dtype=complex)
            padded[: self.amplitudes.size] = self.amplitudes
            return FockVector(padded, self.tail_mass)
        dropped = self.amplitudes[n_max + 1 :]
        lost = float(np.sum(np.abs(dropped) ** 2))
        if np.max(np.abs(dropped)) > LADDER_TRUNCATION_TOLERANCE:
            warnings.warn(
                f"Truncating to n_max={n_max} drops squared norm {lost:.3e}",
                TruncationWarning,
                stacklevel=2,
            )
        return FockVector(self.amplitudes[: n_max + 1], self.tail_mass + lost)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian matrix on a truncated single- or two-mode Fock space.

    Two-mode entries are indexed by the flattened pair n1 * (n_max + 1) + n2,
    which is the ordering produced by numpy.kron. Unnormalized matrices are
    allowed as intermediates; use normalized() before reading probabilities.
    """

    entries: np.ndarray
    modes: int = 1

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("DensityMatrix entries must be a square matrix")
        if self.modes not in (1, 2):
            raise ValueError(f"Unsupported mode count {self.modes}")
        dim = entries.shape[0]
        side = math.isqrt(dim) if self.modes == 2 else dim
        if side**self.modes != dim:
            raise ValueError(f"Dimension {dim} is not a {self.modes}-mode Fock space")
        scale = max(1.0, float(np.max(np.abs(entries))))
        if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOLERANCE * scale:
            raise ValueError(ERROR_NOT_HERMITIAN)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_max(self) -> int:
        side = math.isqrt(self.dim) if self.modes == 2 else self.dim
        return side - 1

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def diagonal(self) -> np.ndarray:
        """Photon-number populations (real part of the diagonal, a copy)."""
        return np.real(np.diag(self.entries)).copy()

    def eigenvalue_floor(self) -> float:
        """Smallest eigenvalue; a physical state keeps it above -tolerance."""
        return float(np.min(np.linalg.eigvalsh(self.entries)))

    def normalized(self) -> "DensityMatrix":
        """Copy divided by its trace.

        Raises:
            ZeroNormError: If the trace is not positive.
        """
        trace = self.trace
        if trace <= 0.0:
            raise ZeroNormError(ERROR_ZERO_NORM)
        return DensityMatrix(self.entries / trace, self.modes)

    def as_tensor(self) -> np.ndarray:
        """Two-mode entries reshaped to rho[n1, n2, n1', n2']."""
        if self.modes != 2:
            raise ValueError("as_tensor is only defined for two-mode states")
        d = self.n_max + 1
        return self.entries.reshape(d, d, d, d)

    @classmethod
    def from_vector(cls, state: FockVector) -> "DensityMatrix":
        c = state.amplitudes
        return cls(np.outer(c, c.conj()), modes=1)

    @classmethod
    def from_mixture(
        cls, weights: Sequence[float], states: Sequence[FockVector]
    ) -> "DensityMatrix":
        """
        Build sum_i w_i |psi_i><psi_i| on the largest truncation among the states.

        Args:
            weights: Mixture weights, used as given (not renormalized)
            states: Pure components; their amplitudes are used unnormalized

        Returns:
            Single-mode DensityMatrix
        """
        if len(weights) != len(states):
            raise ValueError(ERROR_SHAPE_MISMATCH)
        n_max = max(s.n_max for s in states)
        entries = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        for weight, state in zip(weights, states):
            c = state.resized(n_max).amplitudes
            entries += weight * np.outer(c, c.conj())
        return cls(entries, modes=1)

    @classmethod
    def diagonal_state(cls, populations: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(populations, dtype=complex)), modes=1)

    @classmethod
    def tensor(cls, first: "DensityMatrix", second: "DensityMatrix") -> "DensityMatrix":
        """Two-mode product state rho_1 (x) rho_2 in numpy.kron ordering."""
        if first.modes != 1 or second.modes != 1 or first.n_max != second.n_max:
            raise ValueError(ERROR_SHAPE_MISMATCH)
        return cls(np.kron(first.entries, second.entries), modes=2)

    def resized(self, n_max: int) -> "DensityMatrix":
        """Single-mode copy zero-padded or cut to a new truncation."""
        if self.modes != 1:
            raise ValueError("resized is only defined for single-mode states")
        if n_max == self.n_max:
            return self
        entries = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        keep = min(n_max, self.n_max) + 1
        entries[:keep, :keep] = self.entries[:keep, :keep]
        return DensityMatrix(entries, modes=1)


@dataclass(frozen=True)
class SqueezeParam:
    """Squeezed-vacuum parameter kappa with |kappa| < 1."""

    kappa: complex

    def __post_init__(self):
        kappa = complex(self.kappa)
        if not abs(kappa) < 1.0:
            raise DomainError(f"{ERROR_KAPPA_DOMAIN} (got |kappa|={abs(kappa):.6g})")
        object.__setattr__(self, "kappa", kappa)

    @classmethod
    def from_polar(cls, magnitude: float, phase: float = 0.0) -> "SqueezeParam":
        return cls(cmath.rect(magnitude, phase))

    @classmethod
    def from_rapidity(cls, rapidity: float, phase: float = 0.0) -> "SqueezeParam":
        """Convention kappa = tanh(s) * exp(i phase) for squeeze rapidity s."""
        return cls(cmath.rect(math.tanh(rapidity), phase))

    @property
    def magnitude(self) -> float:
        return abs(self.kappa)

    @property
    def phase(self) -> float:
        return cmath.phase(self.kappa)

    def attenuated(self, transmittance: complex) -> "SqueezeParam":
        """Effective parameter kappa' = T^2 kappa after the beam splitter."""
        return SqueezeParam(transmittance**2 * self.kappa)


KappaLike = Union[SqueezeParam, complex, float]


def _as_kappa(kappa: KappaLike) -> complex:
    if isinstance(kappa, SqueezeParam):
        return kappa.kappa
    return SqueezeParam(kappa).kappa


def _check_count(times: int):
    if times < 0:
        raise ValueError(f"{ERROR_NEGATIVE_COUNT} (got {times})")


def make_fock(n: int, n_max: int) -> FockVector:
    """
    Number state |n> on 0..n_max.

    Args:
        n: Photon number
        n_max: Truncation, must be >= n

    Returns:
        FockVector with a single unit amplitude

    Raises:
        TruncationError: If n exceeds n_max
    """
    _check_count(n)
    if n > n_max:
        raise TruncationError(f"{ERROR_FOCK_RANGE}: n={n} > n_max={n_max}")
    amplitudes = np.zeros(n_max + 1, dtype=complex)
    amplitudes[n] = 1.0
    return FockVector(amplitudes)


def make_amplitudes(values: Iterable[complex]) -> FockVector:
    """Vector from explicit amplitudes c_0, c_1, ..., kept unnormalized."""
    return FockVector(np.asarray(list(values), dtype=complex))


def _squeezed_populations(magnitude: float, n_pairs: int) -> np.ndarray:
    """|c_{2j}|^2 for j = 0..n_pairs-1 via the ratio recurrence."""
    ratios = (2.0 * np.arange(n_pairs - 1) + 1.0) / (2.0 * np.arange(n_pairs - 1) + 2.0)
    populations = np.empty(n_pairs)
    populations[0] = math.sqrt(1.0 - magnitude**2)
    if n_pairs > 1:
        populations[1:] = populations[0] * np.cumprod(ratios * magnitude**2)
    return populations


def squeezed_vacuum_tail(kappa: KappaLike, n_max: int) -> float:
    """Squared norm of the squeezed vacuum above n_max, by direct summation."""
    magnitude = abs(_as_kappa(kappa))
    if magnitude == 0.0:
        return 0.0
    j = n_max // 2 + 1
    populations = _squeezed_populations(magnitude, j + 1)
    term = float(populations[j])
    terms = []
    total = 0.0
    # populations decay at least geometrically with ratio |kappa|^2
    while term > 0.0:
        terms.append(term)
        total += term
        if term * magnitude**2 / (1.0 - magnitude**2) < 1e-17 * total:
            break
        term *= magnitude**2 * (2 * j + 1) / (2 * j + 2)
        j += 1
    return math.fsum(terms)


def auto_truncation(kappa: KappaLike, count: int = 0) -> int:
    """Smallest even n_max with squeezed-vacuum tail below SQUEEZE_TAIL_TOLERANCE,
    plus ladder headroom for `count` added or subtracted photons."""
    _check_count(count)
    magnitude = abs(_as_kappa(kappa))
    base = 0
    if magnitude > 0.0:
        populations = _squeezed_populations(magnitude, MAX_AUTO_N_MAX // 2 + 1)
        tails = 1.0 - np.cumsum(populations)
        below = np.nonzero(tails < SQUEEZE_TAIL_TOLERANCE)[0]
        if below.size == 0:
            raise DomainError(
                f"{ERROR_KAPPA_DOMAIN}: |kappa|={magnitude:.6g} needs n_max > "
                f"{MAX_AUTO_N_MAX}"
            )
        base = 2 * int(below[0])
        while squeezed_vacuum_tail(magnitude, base) >= SQUEEZE_TAIL_TOLERANCE:
            base += 2
    return base + count + TRUNCATION_HEADROOM


def make_squeezed_vacuum(kappa: KappaLike, n_max: Optional[int] = None) -> FockVector:
    """Squeezed vacuum sum_n (1-|k|^2)^(1/4) sqrt((2n)!)/(2^n n!) k^n |2n>."""
    kappa = _as_kappa(kappa)
    if n_max is None:
        n_max = auto_truncation(kappa)
    amplitudes = np.zeros(n_max + 1, dtype=complex)
    amplitudes[0] = (1.0 - abs(kappa) ** 2) ** 0.25
    for n in range(0, n_max - 1, 2):
        amplitudes[n + 2] = amplitudes[n] * kappa * math.sqrt((n + 1) / (n + 2))
    return FockVector(amplitudes, squeezed_vacuum_tail(kappa, n_max))


def make_coherent(alpha: complex, n_max: int) -> FockVector:
    """
    Coherent state exp(-|alpha|^2/2) sum_n alpha^n / sqrt(n!) |n>.

    Args:
        alpha: Complex amplitude
        n_max: Truncation; the squared norm beyond it is kept as tail_mass

    Returns:
        FockVector built by the ratio recurrence c_{n+1} = c_n alpha / sqrt(n+1)
    """
    alpha = complex(alpha)
    amplitudes = np.zeros(n_max + 1, dtype=complex)
    amplitudes[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(n_max):
        amplitudes[n + 1] = amplitudes[n] * alpha / math.sqrt(n + 1)
    kept = math.fsum(np.abs(amplitudes) ** 2)
    return FockVector(amplitudes, max(0.0, 1.0 - kept))


def make_thermal(mean_photons: float, n_max: int) -> DensityMatrix:
    """Diagonal thermal state, truncated (trace = 1 - tail)."""
    if mean_photons < 0:
        raise DomainError(
            f"Thermal mean photon number must be >= 0 (got {mean_photons})"
        )
    ratio = mean_photons / (1.0 + mean_photons)
    populations = (1.0 - ratio) * ratio ** np.arange(n_max + 1)
    return DensityMatrix.diagonal_state(populations)


def _phase_powers(value: complex, n_max: int) -> np.ndarray:
    """value**n for n = 0..n_max without complex 0**n pitfalls."""
    n = np.arange(n_max + 1)
    return np.power(abs(value), n) * np.exp(1j * n * cmath.phase(value))


def apply_creation(state: FockVector, times: int, extend: bool = False) -> FockVector:
    """(a^dagger)^times, unnormalized.

    With extend=False the truncation is kept and dropped mass triggers a
    TruncationWarning; extend=True grows n_max by `times` so nothing is lost.
    """
    _check_count(times)
    c = state.amplitudes
    n = np.arange(c.size)
    factors = np.array([falling_sqrt_ratio(int(k) + times, times) for k in n])
    raised = np.zeros(c.size + times, dtype=complex)
    raised[times:] = factors * c
    result = FockVector(raised, state.tail_mass)
    if extend:
        return result
    return result.resized(state.n_max)


def apply_annihilation(state: FockVector, times: int) -> FockVector:
    """
    Apply a^times without normalizing.

    Args:
        state: Input vector
        times: Number of annihilations, >= 0

    Returns:
        FockVector of the same truncation; the zero vector when times exceeds
        the highest occupied number
    """
    _check_count(times)
    c = state.amplitudes
    lowered = np.zeros(c.size, dtype=complex)
    if times <= state.n_max:
        factors = np.array([falling_sqrt_ratio(k, times) for k in range(times, c.size)])
        lowered[: c.size - times] = factors * c[times:]
    return FockVector(lowered)


def apply_attenuation(state: FockVector, transmittance: complex) -> FockVector:
    """T^n on each amplitude; T = 0 leaves only c_0 |0>."""
    if abs(transmittance) > 1.0 + 1e-15:
        raise DomainError(f"|T| must not exceed 1 (got {abs(transmittance):.6g})")
    return FockVector(state.amplitudes * _phase_powers(transmittance, state.n_max))


def rotate(state: FockVector, angle: float) -> FockVector:
    """Phase-space rotation c_n -> c_n exp(i n angle).

    Rotating by angle shifts every quadrature phase by the same angle and turns
    a squeeze parameter kappa into kappa exp(2i angle).
    """
    n = np.arange(state.n_max + 1)
    return FockVector(state.amplitudes * np.exp(1j * n * angle), state.tail_mass)


def normalize(state: FockVector) -> FockVector:
    """Unit-norm copy; tail_mass is rescaled with the amplitudes.

    Raises:
        ZeroNormError: If the vector is zero.
    """
    norm_squared = state.norm_squared
    if norm_squared <= 0.0:
        raise ZeroNormError(ERROR_ZERO_NORM)
    return FockVector(
        state.amplitudes / math.sqrt(norm_squared), state.tail_mass / norm_squared
    )


def canonical_phase(state: FockVector, threshold: float = 0.0) -> FockVector:
    """Fix the global phase: lowest nonzero amplitude becomes real positive."""
    c = state.amplitudes
    nonzero = np.nonzero(np.abs(c) > threshold)[0]
    if nonzero.size == 0:
        return state
    lead = c[nonzero[0]]
    return FockVector(c * (abs(lead) / lead), state.tail_mass)


def inner_product(bra: FockVector, ket: FockVector) -> complex:
    """<bra|ket>, padding the shorter vector with zeros."""
    n_max = max(bra.n_max, ket.n_max)
    left, right = bra.resized(n_max).amplitudes, ket.resized(n_max).amplitudes
    return complex(np.vdot(left, right))


StateLike = Union[FockVector, DensityMatrix]


def _as_matrix(state: StateLike, n_max: int) -> np.ndarray:
    if isinstance(state, FockVector):
        c = normalize(state).resized(n_max).amplitudes
        return np.outer(c, c.conj())
    return state.normalized().resized(n_max).entries


def fidelity(first: StateLike, second: StateLike) -> float:
    """|<a|b>|^2 for pure states, <a|rho|a> for pure-mixed,
    Uhlmann (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for two mixed states."""
    if isinstance(first, FockVector) and isinstance(second, FockVector):
        overlap = inner_product(normalize(first), normalize(second))
        return abs(overlap) ** 2
    n_max = max(first.n_max, second.n_max)
    if isinstance(first, FockVector) or isinstance(second, FockVector):
        pure, mixed = first, second
        if not isinstance(first, FockVector):
            pure, mixed = second, first
        c = normalize(pure).resized(n_max).amplitudes
        return float(np.real(np.vdot(c, _as_matrix(mixed, n_max) @ c)))
    rho = _as_matrix(first, n_max)
    sigma = _as_matrix(second, n_max)
    root = sqrtm(rho)
    return float(np.real(np.trace(sqrtm(root @ sigma @ root))) ** 2)


def photon_number_distribution(state: StateLike) -> np.ndarray:
    """
    Populations p_n of a pure or single-mode mixed state.

    Args:
        state: FockVector (|c_n|^2, unnormalized) or single-mode DensityMatrix

    Returns:
        Array of length n_max + 1
    """
    if isinstance(state, FockVector):
        return np.abs(state.amplitudes) ** 2
    if state.modes != 1:
        raise ValueError("photon_number_distribution expects a single-mode state")
    return state.diagonal()


def mean_photon_number(state: StateLike) -> float:
    """sum n p_n / sum p_n, so unnormalized inputs are fine."""
    populations = photon_number_distribution(state)
    total = float(np.sum(populations))
    if total <= 0.0:
        raise ZeroNormError(ERROR_ZERO_NORM)
    return float(np.dot(np.arange(populations.size), populations) / total)


def as_density(state: StateLike) -> DensityMatrix:
    """Density matrix of a pure state; density matrices pass through."""
    if isinstance(state, FockVector):
        return DensityMatrix.from_vector(state)
    return state
