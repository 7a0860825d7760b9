"""Lossless beam splitter and conditional photon-number measurement.

The splitter acts as V = exp(-i(phi_T - phi_R) L3) exp(-2i theta L2)
exp(-i(phi_T + phi_R) L3) on the two input modes and the output density
operator is V^dagger rho V. V conserves total photon number N, so it is applied
block by block: each (N+1)x(N+1) block is indexed by the mode-1 photon number
k = 0..N of the pair |k, N-k>.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag, expm

from config.constants import (
    BINOMIAL_BLOCK_LIMIT,
    BLOCK_CACHE_SIZE,
    ERROR_IMPROBABLE,
    ERROR_NEGATIVE_COUNT,
    FULL_REFLECTION_TOLERANCE,
    IMPROBABLE_PROBABILITY,
    LADDER_TRUNCATION_TOLERANCE,
)
from src.catgen.states.combinatorics import binomial, log_factorials
from src.catgen.states.fock_space import (
    DensityMatrix,
    FockVector,
    apply_annihilation,
    apply_attenuation,
    apply_creation,
    canonical_phase,
    make_fock,
    normalize,
    photon_number_distribution,
)
from src.catgen.utils.errors import (
    DomainError,
    ImprobableOutcomeError,
    TruncationWarning,
)

StateLike = Union[FockVector, DensityMatrix]


@dataclass(frozen=True)
class BeamSplitterParams:
    """Mixing angle and phases.

    T = cos(theta) e^{i phi_t}, R = sin(theta) e^{i phi_r}.
    """

    theta: float
    phi_t: float = 0.0
    phi_r: float = 0.0

    @classmethod
    def from_transmissivity(
        cls, transmissivity: float, phi_t: float = 0.0, phi_r: float = 0.0
    ) -> "BeamSplitterParams":
        """Build from the power transmission |T|^2 in [0, 1]."""
        if not 0.0 <= transmissivity <= 1.0:
            raise DomainError(f"|T|^2 must lie in [0, 1] (got {transmissivity})")
        return cls(math.acos(math.sqrt(transmissivity)), phi_t, phi_r)

    @property
    def transmittance(self) -> complex:
        return math.cos(self.theta) * cmath.exp(1j * self.phi_t)

    @property
    def reflectance(self) -> complex:
        return math.sin(self.theta) * cmath.exp(1j * self.phi_r)

    @property
    def transmissivity(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def reflectivity(self) -> float:
        return math.sin(self.theta) ** 2


@dataclass(frozen=True, eq=False)
class ConditionalResult:
    """Reduced state of output mode 1 after detecting m2 photons in mode 2."""

    state: StateLike
    probability: float
    outcome: Tuple[int, int]


def _check_counts(*counts: int):
    for count in counts:
        if count < 0:
            raise ValueError(f"{ERROR_NEGATIVE_COUNT} (got {count})")


def _log_power(base: float, exponent: np.ndarray) -> np.ndarray:
    """exponent * log|base| with 0 * log 0 taken as 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logged = exponent * np.log(abs(base))
    return np.where(exponent == 0, 0.0, logged)


def _binomial_block(
    n_total: int, theta: float, phi_t: float, phi_r: float
) -> np.ndarray:
    """SU(2) rotation block from the binomial sum, magnitudes in log space.

    <k, N-k|V|n1, N-n1> = sqrt(k!(N-k)!/(n1! n2!)) sum_i C(n1,i) C(n2,k-i)
        (T*)^i (R*)^(n1-i) (-R)^(k-i) T^(n2-k+i)
    The phases collect outside the sum into exp(i(phi_t(n2-k) + phi_r(k-n1))).
    """
    size = n_total + 1
    k = np.arange(size)[:, None, None]
    n1 = np.arange(size)[None, :, None]
    i = np.arange(size)[None, None, :]
    n2 = n_total - n1
    j = k - i
    valid = (i <= n1) & (j >= 0) & (j <= n2)

    lf = log_factorials(n_total)

    def safe(index: np.ndarray) -> np.ndarray:
        return np.clip(index, 0, n_total)

    cos_exponent = 2 * i + n2 - k
    sin_exponent = n1 + k - 2 * i
    with np.errstate(invalid="ignore", over="ignore"):
        log_magnitude = (
            0.5 * (lf[k] + lf[n_total - k] - lf[n1] - lf[n2])
            + lf[n1] - lf[safe(i)] - lf[safe(n1 - i)]
            + lf[n2] - lf[safe(j)] - lf[safe(n2 - j)]
            + _log_power(math.cos(theta), cos_exponent)
            + _log_power(math.sin(theta), sin_exponent)
        )
        magnitude = np.exp(np.where(valid, log_magnitude, 0.0))
    sign = np.where(j % 2 == 0, 1.0, -1.0)
    if math.cos(theta) < 0:
        sign = sign * np.where(cos_exponent % 2 == 0, 1.0, -1.0)
    if math.sin(theta) < 0:
        sign = sign * np.where(sin_exponent % 2 == 0, 1.0, -1.0)

    terms = np.where(valid, sign * magnitude, 0.0)
    real_block = terms.sum(axis=2)
    rows = np.arange(size)[:, None]
    cols = np.arange(size)[None, :]
    phase = np.exp(1j * (phi_t * (n_total - cols - rows) + phi_r * (rows - cols)))
    return real_block * phase


def _generator_block(
    n_total: int, theta: float, phi_t: float, phi_r: float
) -> np.ndarray:
    """Same block from expm of the L2 generator, dressed with the L3 phases."""
    size = n_total + 1
    k = np.arange(n_total)
    generator = np.zeros((size, size))
    # (a1^dag a2 - a2^dag a1) |k, N-k>
    generator[k + 1, k] = np.sqrt((k + 1.0) * (n_total - k))
    generator[k, k + 1] = -np.sqrt((k + 1.0) * (n_total - k))
    rotation = expm(-theta * generator)
    weights = np.arange(size) - 0.5 * n_total
    outer = np.exp(-1j * (phi_t - phi_r) * weights)
    inner = np.exp(-1j * (phi_t + phi_r) * weights)
    return outer[:, None] * rotation * inner[None, :]


@lru_cache(maxsize=BLOCK_CACHE_SIZE)
def _cached_block(n_total: int, theta: float, phi_t: float, phi_r: float) -> np.ndarray:
    if n_total <= BINOMIAL_BLOCK_LIMIT:
        block = _binomial_block(n_total, theta, phi_t, phi_r)
    else:
        block = _generator_block(n_total, theta, phi_t, phi_r)
    block.setflags(write=False)
    return block


def bs_unitary_block(n_total: int, params: BeamSplitterParams) -> np.ndarray:
    """The photon-number-N block of V, rows k (output) and columns n1 (input)."""
    _check_counts(n_total)
    return _cached_block(n_total, params.theta, params.phi_t, params.phi_r)


def block_cache_stats() -> Dict[str, int]:
    """Hit, miss and size counters of the unitary-block cache."""
    info = _cached_block.cache_info()
    return {"hits": info.hits, "misses": info.misses, "size": info.currsize}


def _block_order(n_max: int) -> np.ndarray:
    """Flattened indices n1 * (n_max+1) + n2 grouped by N = n1 + n2 <= n_max."""
    d = n_max + 1
    return np.array(
        [n1 * d + (n_total - n1) for n_total in range(d) for n1 in range(n_total + 1)]
    )


def apply_beam_splitter(
    rho_in: DensityMatrix, params: BeamSplitterParams
) -> DensityMatrix:
    """rho_out = V^dagger rho_in V on the two-mode space truncated at n_max per mode.

    Only pairs with n1 + n2 <= n_max are closed under V; input weight outside
    them is dropped with a TruncationWarning.
    """
    if rho_in.modes != 2:
        raise ValueError("apply_beam_splitter expects a two-mode DensityMatrix")
    n_max = rho_in.n_max
    order = _block_order(n_max)
    outside = np.ones(rho_in.dim, dtype=bool)
    outside[order] = False
    dropped = float(np.sum(np.real(np.diag(rho_in.entries))[outside]))
    if dropped > LADDER_TRUNCATION_TOLERANCE:
        warnings.warn(
            f"Input weight {dropped:.3e} has n1 + n2 > n_max={n_max} and is dropped",
            TruncationWarning,
            stacklevel=2,
        )

    unitary = block_diag(*[bs_unitary_block(n, params) for n in range(n_max + 1)])
    sub = rho_in.entries[np.ix_(order, order)]
    out = np.zeros_like(rho_in.entries)
    out[np.ix_(order, order)] = unitary.conj().T @ sub @ unitary
    return DensityMatrix(out, modes=2)


def condition_on_count(
    rho_out: DensityMatrix, m2: int, n0: int = 0
) -> ConditionalResult:
    """Project output mode 2 on |m2>: state <m2|rho|m2>/Tr, probability Tr."""
    _check_counts(m2, n0)
    if m2 > rho_out.n_max:
        raise DomainError(f"Detected count m2={m2} exceeds n_max={rho_out.n_max}")
    reduced = rho_out.as_tensor()[:, m2, :, m2]
    probability = float(np.real(np.trace(reduced)))
    if probability < IMPROBABLE_PROBABILITY:
        raise ImprobableOutcomeError(
            f"{ERROR_IMPROBABLE}: P(n0={n0}, m2={m2}) = {probability:.3e}", probability
        )
    reduced = 0.5 * (reduced + reduced.conj().T)
    return ConditionalResult(
        DensityMatrix(reduced / probability), min(probability, 1.0), (n0, m2)
    )


def transform_product(
    first: FockVector, second: FockVector, params: BeamSplitterParams
) -> np.ndarray:
    """Output amplitudes psi[n1, n2] of V^dagger |first>|second>.

    The two-mode space is cut at first.n_max + second.n_max, which holds every
    input pair, so nothing is truncated.
    """
    n_max = first.n_max + second.n_max
    joint = np.outer(first.resized(n_max).amplitudes, second.resized(n_max).amplitudes)
    out = np.zeros_like(joint)
    for n_total in range(n_max + 1):
        n1 = np.arange(n_total + 1)
        column = joint[n1, n_total - n1]
        if not np.any(column):
            continue
        out[n1, n_total - n1] = bs_unitary_block(n_total, params).conj().T @ column
    return out


def _pure_components(state: StateLike) -> List[Tuple[float, FockVector]]:
    if isinstance(state, FockVector):
        return [(1.0, state)]
    if state.modes != 1:
        raise ValueError("Signal input must be a single-mode state")
    eigenvalues, eigenvectors = np.linalg.eigh(state.entries)
    return [
        (float(value), FockVector(eigenvectors[:, idx]))
        for idx, value in enumerate(eigenvalues)
        if value > LADDER_TRUNCATION_TOLERANCE
    ]


def conditional_output(
    rho_in1: StateLike, n0: int, m2: int, params: BeamSplitterParams
) -> ConditionalResult:
    """Full two-mode route for any outcome (n0 photons in, m2 detected).

    Pure inputs give a pure FockVector; mixed inputs are split into their
    eigenvectors and recombined.
    """
    _check_counts(n0, m2)
    components = _pure_components(rho_in1)
    n_max = max(vector.n_max for _, vector in components)
    reference = make_fock(n0, n0)
    conditioned = []
    for weight, vector in components:
        psi = transform_product(vector.resized(n_max), reference, params)
        column = psi[:, m2] if m2 < psi.shape[1] else np.zeros(psi.shape[0])
        conditioned.append((weight, column))
    probability = sum(w * float(np.sum(np.abs(c) ** 2)) for w, c in conditioned)
    if probability < IMPROBABLE_PROBABILITY:
        raise ImprobableOutcomeError(
            f"{ERROR_IMPROBABLE}: P(n0={n0}, m2={m2}) = {probability:.3e}", probability
        )
    if isinstance(rho_in1, FockVector):
        state = canonical_phase(normalize(FockVector(conditioned[0][1])))
    else:
        entries = sum(w * np.outer(c, c.conj()) for w, c in conditioned)
        state = DensityMatrix(entries / probability)
    return ConditionalResult(state, min(probability, 1.0), (n0, m2))


def added_probability(
    populations: Sequence[float], n0: int, params: BeamSplitterParams
) -> float:
    """P(n0) = |R|^(2 n0) sum_n |T|^(2n) C(n + n0, n0) p_n, with m2 = 0."""
    _check_counts(n0)
    populations = np.asarray(populations, dtype=float)
    n = np.arange(populations.size)
    weights = np.array([binomial(int(k) + n0, n0) for k in n])
    transmitted = np.power(params.transmissivity, n)
    return float(params.reflectivity**n0 * np.sum(transmitted * weights * populations))


def subtracted_probability(
    populations: Sequence[float], m: int, params: BeamSplitterParams
) -> float:
    """P(m) = |R|^(2m) sum_n |T|^(2n) C(n + m, m) p_(n+m) for vacuum reference."""
    _check_counts(m)
    populations = np.asarray(populations, dtype=float)
    if m >= populations.size:
        return 0.0
    shifted = populations[m:]
    n = np.arange(shifted.size)
    weights = np.array([binomial(int(k) + m, m) for k in n])
    transmitted = np.power(params.transmissivity, n)
    return float(params.reflectivity**m * np.sum(transmitted * weights * shifted))


def _raise_if_improbable(probability: float, n0: int, m2: int):
    if probability < IMPROBABLE_PROBABILITY:
        raise ImprobableOutcomeError(
            f"{ERROR_IMPROBABLE}: P(n0={n0}, m2={m2}) = {probability:.3e}", probability
        )


def photon_added_state(
    state: FockVector, n0: int, params: BeamSplitterParams
) -> ConditionalResult:
    """Add n0 photons: normalized (a^dagger)^n0 T^n |state>, heralded by m2 = 0.

    n0 = 0 is the trivial outcome (attenuated input) and is accepted so that
    Fock mixtures can include it. The result grows to n_max + n0.
    """
    _check_counts(n0)
    probability = added_probability(np.abs(state.amplitudes) ** 2, n0, params)
    _raise_if_improbable(probability, n0, 0)
    attenuated = apply_attenuation(state, params.transmittance)
    raised = apply_creation(attenuated, n0, extend=True)
    return ConditionalResult(
        canonical_phase(normalize(raised)), min(probability, 1.0), (n0, 0)
    )


def photon_subtracted_state(
    state: FockVector, m: int, params: BeamSplitterParams
) -> ConditionalResult:
    """Subtract m photons: normalized a^m T^n |state>, m photons seen in mode 2."""
    _check_counts(m)
    probability = subtracted_probability(np.abs(state.amplitudes) ** 2, m, params)
    _raise_if_improbable(probability, 0, m)
    if params.transmissivity < FULL_REFLECTION_TOLERANCE:
        # full reflection swaps the modes: mode 1 carries the vacuum reference
        vacuum = make_fock(0, state.n_max)
        return ConditionalResult(vacuum, min(probability, 1.0), (0, m))
    lowered = apply_annihilation(apply_attenuation(state, params.transmittance), m)
    return ConditionalResult(
        canonical_phase(normalize(lowered)), min(probability, 1.0), (0, m)
    )


def _ladder_matrix(
    n_max: int, count: int, added: bool, transmittance: complex
) -> np.ndarray:
    """sqrt(C(n+count, count)) T^n mapping |n> -> |n+count> (added) or
    |n+count> -> |n> (subtracted); free of any division by T."""
    size = n_max + 1
    n = np.arange(size)
    powers = abs(transmittance) ** n * np.exp(1j * n * cmath.phase(transmittance))
    if added:
        matrix = np.zeros((size + count, size), dtype=complex)
        for n in range(size):
            matrix[n + count, n] = math.sqrt(binomial(n + count, count)) * powers[n]
        return matrix
    matrix = np.zeros((size, size), dtype=complex)
    for n in range(size - count):
        matrix[n, n + count] = math.sqrt(binomial(n + count, count)) * powers[n]
    return matrix


def photon_added_density(
    rho_in1: DensityMatrix, n0: int, params: BeamSplitterParams
) -> ConditionalResult:
    """Photon addition for a mixed signal (thermal, dephased coherent, ...)."""
    _check_counts(n0)
    probability = added_probability(rho_in1.diagonal(), n0, params)
    _raise_if_improbable(probability, n0, 0)
    ladder = _ladder_matrix(rho_in1.n_max, n0, True, params.transmittance)
    out = ladder @ rho_in1.entries @ ladder.conj().T
    return ConditionalResult(
        DensityMatrix(out / np.real(np.trace(out))), min(probability, 1.0), (n0, 0)
    )


def photon_subtracted_density(
    rho_in1: DensityMatrix, m: int, params: BeamSplitterParams
) -> ConditionalResult:
    """
    Photon subtraction for a mixed signal: a^m T^n rho T^*n a^dagger^m, renormalized.

    Args:
        rho_in1: Single-mode signal density matrix
        m: Photons detected in the reflected mode
        params: Beam splitter

    Returns:
        ConditionalResult with outcome (0, m)

    Raises:
        ImprobableOutcomeError: If P(0, m) is below IMPROBABLE_PROBABILITY
    """
    _check_counts(m)
    probability = subtracted_probability(rho_in1.diagonal(), m, params)
    _raise_if_improbable(probability, 0, m)
    ladder = _ladder_matrix(rho_in1.n_max, m, False, params.transmittance)
    out = ladder @ rho_in1.entries @ ladder.conj().T
    return ConditionalResult(
        DensityMatrix(out / np.real(np.trace(out))), min(probability, 1.0), (0, m)
    )


def event_probability(
    rho_in1: StateLike, n0: int, m2: int, params: BeamSplitterParams
) -> float:
    """P(n0, m2) from the signal photon-number distribution alone.

    With nu = n0 - m2 and mu = max(0, nu):
      P = sum_n1 |T|^(2(n1 - m2)) n0! n1! / ((n1 + nu)! m2!) S(n1)^2 p_n1
      S(n1) = sum_{j=mu}^{n0} (-1)^j |R|^(2j - nu) C(m2, j - nu) C(n1 + j, j)
    The j and k sums of the double sum are identical, hence the square.
    """
    _check_counts(n0, m2)
    populations = photon_number_distribution(rho_in1)
    t2 = params.transmissivity
    r = math.sqrt(params.reflectivity)
    if t2 < FULL_REFLECTION_TOLERANCE:
        return float(populations[m2]) if m2 < populations.size else 0.0

    nu = n0 - m2
    mu = max(0, nu)
    total = 0.0
    for n1 in range(mu - nu, populations.size):
        if populations[n1] == 0.0:
            continue
        inner = math.fsum(
            (-1) ** j * r ** (2 * j - nu) * binomial(m2, j - nu) * binomial(n1 + j, j)
            for j in range(mu, n0 + 1)
        )
        prefactor = math.exp(
            math.lgamma(n0 + 1) + math.lgamma(n1 + 1)
            - math.lgamma(n1 + nu + 1) - math.lgamma(m2 + 1)
        )
        total += t2 ** (n1 - m2) * prefactor * inner * inner * populations[n1]
    return float(total)


class BeamSplitter:
    """Beam splitter bound to fixed parameters, with run logging for the CLI."""

    def __init__(
        self,
        params: BeamSplitterParams,
        verbose: bool = False,
        logger: Optional[Callable[[str], None]] = None,
    ):
        """
        Args:
            params: Mixing angle and phases used for every call
            verbose: Log each conditioning with its probability
            logger: Callable taking one message string (e.g. RunLogger)
        """
        self.params = params
        self.verbose = verbose
        self.logger = logger or (lambda msg: None)

    def _report(self, label: str, result: ConditionalResult) -> ConditionalResult:
        if self.verbose:
            n0, m2 = result.outcome
            self.logger(
                f"[{label}] n0={n0} m2={m2} P={result.probability:.6e} "
                f"(blocks cached: {block_cache_stats()['size']})"
            )
        return result

    def add_photons(self, state: FockVector, n0: int) -> ConditionalResult:
        """Ladder shortcut for n0 photons in, none detected."""
        return self._report("ADD", photon_added_state(state, n0, self.params))

    def subtract_photons(self, state: FockVector, m: int) -> ConditionalResult:
        """Ladder shortcut for vacuum in, m photons detected."""
        return self._report("SUBTRACT", photon_subtracted_state(state, m, self.params))

    def condition(self, state: StateLike, n0: int, m2: int) -> ConditionalResult:
        """General outcome through the two-mode transform."""
        return self._report("CONDITION", conditional_output(state, n0, m2, self.params))

    def probability(self, state: StateLike, n0: int, m2: int) -> float:
        """P(n0, m2) from photon-number populations only."""
        return event_probability(state, n0, m2, self.params)
