"""Mixed conditional states from imperfect detection and imperfect Fock sources.

Photon subtraction with a chopping detector heralds a posterior-weighted
mixture of |Psi_{0,m}>; photon addition fed by a binomially distributed
reference beam gives a mixture of |Psi_{n0,0}>.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import binom

from config.constants import (
    ERROR_NEGATIVE_COUNT,
    ERROR_SUCCESS_RANGE,
    IMPROBABLE_PROBABILITY,
    MAX_PRIOR_COUNT,
    NORM_TOLERANCE,
    PRIOR_CUMULATIVE_TARGET,
)
from src.catgen.analytic.squeezed_cats import (
    CatKind,
    CatParams,
    cat_state,
    husimi,
    kappa_prime,
    prob_added,
    prob_subtracted,
    quad_dist,
    wigner,
)
from src.catgen.detection.chopping import ChoppingDetector, posterior
from src.catgen.optics.beam_splitter import BeamSplitterParams
from src.catgen.phasespace.transforms import (
    husimi_numeric,
    quad_dist_numeric,
    wigner_numeric,
)
from src.catgen.states.fock_space import (
    DensityMatrix,
    FockVector,
    KappaLike,
    SqueezeParam,
    fidelity,
)
from src.catgen.utils.errors import DomainError, TruncationWarning

WEIGHTINGS = ("source", "bayes")


@dataclass(frozen=True)
class BinomialSource:
    """Imperfect n-photon source: n0 ~ Binomial(n_trials, success)."""

    n_trials: int
    success: float

    def __post_init__(self):
        if self.n_trials < 0:
            raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got {self.n_trials})")
        if not 0.0 < self.success < 1.0:
            raise DomainError(f"{ERROR_SUCCESS_RANGE} (got {self.success})")


def binomial_pmf(src: BinomialSource, n0: int) -> float:
    return float(binom.pmf(n0, src.n_trials, src.success))


@dataclass(frozen=True, eq=False)
class MixedConditional:
    """sum_i weights[i] |Psi_i><Psi_i| over conditional cat states.

    trivial_weight is the weight of the count-0 component (nothing added or
    subtracted); detect_probability is the probability of the heralding event.
    """

    counts: Tuple[int, ...]
    weights: np.ndarray
    components: Tuple[FockVector, ...]
    detect_probability: float
    trivial_weight: float
    kappa_prime: complex
    mode: CatKind

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if len(self.counts) != weights.size or len(self.components) != weights.size:
            raise ValueError("counts, weights and components must have equal length")
        if abs(float(np.sum(weights)) - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"Mixture weights sum to {np.sum(weights):.15g}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def _params(self, count: int) -> CatParams:
        return CatParams(self.kappa_prime, count, self.mode)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix.from_mixture(self.weights, self.components)

    def quad_dist(self, x, phi: float, numeric: bool = False):
        if numeric:
            return quad_dist_numeric(self.density_matrix(), x, phi)
        return sum(
            w * np.asarray(quad_dist(self._params(c), x, phi))
            for c, w in zip(self.counts, self.weights)
        )

    def wigner(self, x, p, numeric: bool = False):
        if numeric:
            return wigner_numeric(self.density_matrix(), x, p)
        return sum(
            w * np.asarray(wigner(self._params(c), x, p))
            for c, w in zip(self.counts, self.weights)
        )

    def husimi(self, x, p, numeric: bool = False):
        if numeric:
            return husimi_numeric(self.density_matrix(), x, p)
        return sum(
            w * np.asarray(husimi(self._params(c), x, p))
            for c, w in zip(self.counts, self.weights)
        )

    def fidelity_to(self, state: FockVector) -> float:
        """<psi|rho|psi> against a pure target state."""
        return fidelity(state, self.density_matrix())

    def weight_of(self, count: int) -> float:
        if count not in self.counts:
            return 0.0
        return float(self.weights[self.counts.index(count)])


def _squeeze(kappa: KappaLike) -> SqueezeParam:
    return kappa if isinstance(kappa, SqueezeParam) else SqueezeParam(kappa)


def subtraction_prior(
    kappa: KappaLike,
    params: BeamSplitterParams,
    target: float = PRIOR_CUMULATIVE_TARGET,
    max_count: int = MAX_PRIOR_COUNT,
) -> np.ndarray:
    """P(m) for m = 0..m_cut with cumulative probability >= target.

    Odd m are allowed: only the two-mode total photon number is even.
    """
    kappa = _squeeze(kappa)
    probabilities = []
    cumulative = 0.0
    for m in range(max_count + 1):
        value = prob_subtracted(m, kappa, params.transmittance, params.reflectance)
        probabilities.append(value)
        cumulative += value
        if cumulative >= target:
            return np.asarray(probabilities)
    warnings.warn(
        f"Subtraction prior reaches only {cumulative:.12f} by m={max_count}",
        TruncationWarning,
        stacklevel=2,
    )
    return np.asarray(probabilities)


def _mixture(
    counts: Sequence[int],
    weights: np.ndarray,
    kappa_prime_value: complex,
    mode: CatKind,
    detect_probability: float,
    n_max: Optional[int],
) -> MixedConditional:
    """Drop negligible weights, renormalize, and build the component states."""
    keep = [i for i, w in enumerate(weights) if w > IMPROBABLE_PROBABILITY]
    kept_counts = tuple(int(counts[i]) for i in keep)
    kept = np.asarray([weights[i] for i in keep])
    kept = kept / np.sum(kept)
    components = tuple(
        cat_state(CatParams(kappa_prime_value, count, mode), n_max)
        for count in kept_counts
    )
    trivial = float(kept[kept_counts.index(0)]) if 0 in kept_counts else 0.0
    return MixedConditional(
        kept_counts,
        kept,
        components,
        detect_probability,
        trivial,
        kappa_prime_value,
        mode,
    )


def mixed_subtracted(
    det: ChoppingDetector,
    k: int,
    kappa: KappaLike,
    params: BeamSplitterParams,
    n_max: Optional[int] = None,
) -> MixedConditional:
    """State heralded by k clicks of a chopping detector on the reflected beam."""
    kappa = _squeeze(kappa)
    prior = subtraction_prior(kappa, params)
    weights, evidence = posterior(det, k, prior)
    return _mixture(
        range(prior.size),
        weights,
        kappa_prime(kappa, params.transmittance),
        CatKind.SUBTRACTED,
        evidence,
        n_max,
    )


def mixed_added(
    src: BinomialSource,
    kappa: KappaLike,
    params: BeamSplitterParams,
    weighting: str = "source",
    n_max: Optional[int] = None,
) -> MixedConditional:
    """Photon addition with a binomial reference beam, heralded by no click.

    weighting="source" mixes |Psi_{n0,0}> with the source weights p_n0.
    weighting="bayes" uses p_n0 P(n0) / sum(p P), the exact heralded state for
    the reference beam sum_n0 p_n0 |n0><n0|.
    """
    if weighting not in WEIGHTINGS:
        raise DomainError(
            f"Unknown weighting '{weighting}' (expected one of {WEIGHTINGS})"
        )
    kappa = _squeeze(kappa)
    counts = np.arange(src.n_trials + 1)
    source = binom.pmf(counts, src.n_trials, src.success)
    production = np.array(
        [
            prob_added(int(n0), kappa, params.transmittance, params.reflectance)
            for n0 in counts
        ]
    )
    detect_probability = float(np.sum(source * production))
    if weighting == "source":
        weights = source / np.sum(source)
    else:
        weights = source * production / detect_probability
    return _mixture(
        counts,
        weights,
        kappa_prime(kappa, params.transmittance),
        CatKind.ADDED,
        detect_probability,
        n_max,
    )
