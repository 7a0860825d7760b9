"""Multichannel photon chopping with finite detection efficiency.

m photons are split evenly over N on/off channels; k is the number of channels
that fire. Losses act first as binomial thinning of m to l photons.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import binom

from config.constants import (
    ERROR_CHANNEL_COUNT,
    ERROR_COINCIDENCE_RANGE,
    ERROR_EFFICIENCY_RANGE,
    ERROR_IMPOSSIBLE_EVENT,
    ERROR_NEGATIVE_COUNT,
    EXACT_CHOPPING_LIMIT,
    IMPOSSIBLE_EVIDENCE,
)
from src.catgen.utils.errors import DomainError, ImpossibleEventError


@dataclass(frozen=True)
class ChoppingDetector:
    n_channels: int
    efficiency: float = 1.0

    def __post_init__(self):
        if self.n_channels < 1:
            raise DomainError(f"{ERROR_CHANNEL_COUNT} (got {self.n_channels})")
        if not 0.0 < self.efficiency <= 1.0:
            raise DomainError(f"{ERROR_EFFICIENCY_RANGE} (got {self.efficiency})")


def _check_event(det: ChoppingDetector, k: int, m: int):
    if k < 0 or m < 0:
        raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got k={k}, m={m})")
    if k > det.n_channels:
        raise DomainError(f"{ERROR_COINCIDENCE_RANGE} (got k={k}, N={det.n_channels})")


def _exact_chop(n_channels: int, k: int, m: int) -> float:
    """C(N,k) sum_l (-1)^l C(k,l) (k-l)^m / N^m in integer arithmetic."""
    numerator = sum((-1) ** l * math.comb(k, l) * (k - l) ** m for l in range(k + 1))
    return math.comb(n_channels, k) * numerator / n_channels**m


@lru_cache(maxsize=64)
def _chop_table(n_channels: int, m_max: int) -> np.ndarray:
    """P(k|m) for k = 0..N, m = 0..m_max.

    Exact up to EXACT_CHOPPING_LIMIT, then the occupancy recurrence
    P(k|m+1) = P(k|m) k/N + P(k-1|m) (N-k+1)/N, whose terms are all positive.
    """
    table = np.zeros((n_channels + 1, m_max + 1))
    exact_top = min(m_max, EXACT_CHOPPING_LIMIT)
    for m in range(exact_top + 1):
        for k in range(min(m, n_channels) + 1):
            table[k, m] = _exact_chop(n_channels, k, m)
    k = np.arange(n_channels + 1)
    for m in range(exact_top, m_max):
        stay = table[:, m] * k / n_channels
        advance = np.zeros(n_channels + 1)
        advance[1:] = table[:-1, m] * (n_channels - k[1:] + 1) / n_channels
        table[:, m + 1] = stay + advance
    table.setflags(write=False)
    return table


def chop_prob(det: ChoppingDetector, k: int, m: int) -> float:
    """Lossless probability of k coincident clicks for m photons."""
    _check_event(det, k, m)
    if k > m:
        return 0.0
    if m <= EXACT_CHOPPING_LIMIT:
        return _exact_chop(det.n_channels, k, m)
    return float(_chop_table(det.n_channels, m)[k, m])


def loss_matrix(eta: float, l: int, m: int) -> float:
    """M_{l,m}(eta) = C(m, l) eta^l (1 - eta)^(m - l)."""
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"{ERROR_EFFICIENCY_RANGE} (got {eta})")
    if l < 0 or m < 0:
        raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got l={l}, m={m})")
    return float(binom.pmf(l, m, eta))


def detector_response(det: ChoppingDetector, k: int, m: int) -> float:
    """P_{N,eta}(k|m) = sum_l P_N(k|l) M_{l,m}(eta)."""
    _check_event(det, k, m)
    if k > m:
        return 0.0
    return float(response_matrix(det, m)[k, m])


def response_matrix(det: ChoppingDetector, m_max: int) -> np.ndarray:
    """(N+1) x (m_max+1) array; column m is the click distribution for m photons."""
    if m_max < 0:
        raise DomainError(f"{ERROR_NEGATIVE_COUNT} (got m_max={m_max})")
    chop = _chop_table(det.n_channels, m_max)
    l = np.arange(m_max + 1)[:, None]
    m = np.arange(m_max + 1)[None, :]
    thinning = binom.pmf(l, m, det.efficiency)
    return chop @ thinning


def posterior(
    det: ChoppingDetector, k: int, prior: Sequence[float]
) -> Tuple[np.ndarray, float]:
    """Bayes update of a photon-number prior on k clicks: (posterior, evidence)."""
    prior = np.asarray(prior, dtype=float)
    _check_event(det, k, 0)
    likelihood = response_matrix(det, prior.size - 1)[k]
    joint = likelihood * prior
    evidence = float(np.sum(joint))
    if evidence < IMPOSSIBLE_EVIDENCE:
        raise ImpossibleEventError(
            f"{ERROR_IMPOSSIBLE_EVENT}: "
            f"P(k={k}) = {evidence:.3e} for N={det.n_channels}",
            evidence,
        )
    return joint / evidence, evidence
