import math

import numpy as np
import pytest
from oracles import sample_chopping

from src.catgen.detection.chopping import (
    ChoppingDetector,
    _chop_table,
    _exact_chop,
    chop_prob,
    detector_response,
    loss_matrix,
    posterior,
    response_matrix,
)
from src.catgen.utils.errors import DomainError, ImpossibleEventError

IDEAL_20 = ChoppingDetector(20)
LOSSY_20 = ChoppingDetector(20, efficiency=0.95)


@pytest.mark.parametrize(
    "k, m, expected",
    [(4, 4, 0.72675), (4, 5, 0.363375), (4, 6, 0.118097), (1, 2, 0.05), (2, 2, 0.95)],
)
def test_lossless_coincidences(k, m, expected):
    assert chop_prob(IDEAL_20, k, m) == pytest.approx(expected, abs=5e-7)


@pytest.mark.parametrize(
    "m, expected", [(4, 0.591942), (5, 0.429159), (6, 0.193362)]
)
def test_lossy_coincidences(m, expected):
    assert detector_response(LOSSY_20, 4, m) == pytest.approx(expected, abs=5e-7)


def test_more_clicks_than_photons_is_impossible():
    assert chop_prob(IDEAL_20, 5, 4) == 0.0
    assert detector_response(LOSSY_20, 3, 2) == 0.0
    assert chop_prob(IDEAL_20, 0, 0) == 1.0


def test_single_channel_clicks_for_any_photon():
    det = ChoppingDetector(1)
    assert chop_prob(det, 1, 7) == 1.0
    assert chop_prob(det, 0, 7) == 0.0


@pytest.mark.parametrize("n_channels", [1, 3, 20])
def test_columns_are_distributions(n_channels):
    det = ChoppingDetector(n_channels, efficiency=0.7)
    assert np.allclose(response_matrix(det, 60).sum(axis=0), 1.0, atol=1e-12)
    table = _chop_table(n_channels, 60)
    assert np.allclose(table.sum(axis=0), 1.0, atol=1e-12)
    assert np.all(table >= 0)


def test_recurrence_continues_exact_values():
    table = _chop_table(20, 25)
    for k in range(21):
        exact = _exact_chop(20, k, 25)
        assert table[k, 25] == pytest.approx(exact, rel=1e-10, abs=1e-15)
    assert chop_prob(IDEAL_20, 20, 25) == pytest.approx(table[20, 25])


def test_lossy_response_matches_thinning_sum():
    det = ChoppingDetector(6, efficiency=0.8)
    expected = math.fsum(
        chop_prob(det, 3, l) * loss_matrix(0.8, l, 5) for l in range(6)
    )
    assert detector_response(det, 3, 5) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m", [2, 4, 8])
def test_response_matches_monte_carlo(m):
    trials = 1_000_000
    sampled = sample_chopping(20, 0.95, m, trials=trials, seed=100 + m)
    exact = response_matrix(LOSSY_20, m)[:, m]
    # bins expected to hold under one count get a one-count variance floor
    variance = np.maximum(exact * (1.0 - exact), 1.0 / trials)
    assert np.all(np.abs(sampled - exact) <= 3.0 * np.sqrt(variance / trials))


def test_posteriors_recombine_to_the_prior():
    det = ChoppingDetector(6, efficiency=0.9)
    prior = np.random.default_rng(4).dirichlet(np.ones(9))
    total = np.zeros_like(prior)
    for k in range(det.n_channels + 1):
        weights, evidence = posterior(det, k, prior)
        total += weights * evidence
    assert np.allclose(total, prior, rtol=0.0, atol=1e-12)


def test_loss_matrix():
    assert loss_matrix(0.9, 2, 3) == pytest.approx(3 * 0.81 * 0.1)
    assert loss_matrix(1.0, 3, 3) == 1.0
    assert loss_matrix(0.5, 4, 3) == 0.0
    with pytest.raises(DomainError):
        loss_matrix(0.0, 1, 1)
    with pytest.raises(DomainError):
        loss_matrix(0.5, -1, 1)


def test_detector_validation():
    with pytest.raises(DomainError):
        ChoppingDetector(0)
    with pytest.raises(DomainError):
        ChoppingDetector(4, efficiency=1.5)
    with pytest.raises(DomainError):
        chop_prob(IDEAL_20, 21, 30)
    with pytest.raises(DomainError):
        chop_prob(IDEAL_20, -1, 3)
    with pytest.raises(DomainError):
        response_matrix(IDEAL_20, -1)


def test_posterior_normalizes():
    prior = np.array([0.5, 0.1, 0.2, 0.1, 0.05, 0.05])
    weights, evidence = posterior(LOSSY_20, 4, prior)
    likelihood = response_matrix(LOSSY_20, 5)[4]
    assert evidence == pytest.approx(float(likelihood @ prior))
    assert weights.sum() == pytest.approx(1.0)
    assert np.all(weights[:4] == 0)
    assert weights[5] / weights[4] == pytest.approx(
        0.05 * 0.429159 / (0.05 * 0.591942), rel=1e-5
    )


def test_posterior_rejects_impossible_event():
    with pytest.raises(ImpossibleEventError) as info:
        posterior(IDEAL_20, 4, [0.6, 0.3, 0.1])
    assert info.value.probability == 0.0
