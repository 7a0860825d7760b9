import cmath
import math

import numpy as np
import pytest

from src.catgen.analytic.squeezed_cats import (
    CatKind,
    CatParams,
    cat_state,
    prob_added,
    wigner,
)
from src.catgen.detection.chopping import ChoppingDetector
from src.catgen.detection.mixtures import (
    BinomialSource,
    MixedConditional,
    binomial_pmf,
    mixed_added,
    mixed_subtracted,
    subtraction_prior,
)
from src.catgen.optics.beam_splitter import apply_beam_splitter, condition_on_count
from src.catgen.phasespace.grid import count_interior_minima, quad_slice
from src.catgen.states.fock_space import (
    DensityMatrix,
    fidelity,
    make_fock,
    make_squeezed_vacuum,
)
from src.catgen.utils.errors import DomainError, TruncationWarning

# kappa' = -0.7 behind |T|^2 = 0.9
KAPPA_IN = -0.7 / 0.9
# |kappa| = 0.77 of the shipped presets, phased so that kappa' = -0.693
KAPPA_PRESET = cmath.rect(0.77, math.pi)


@pytest.fixture
def chopped(splitter_90):
    return mixed_subtracted(ChoppingDetector(20, 0.95), 4, KAPPA_IN, splitter_90)


@pytest.fixture
def binomial_added(splitter_90):
    return mixed_added(BinomialSource(4, 0.8), KAPPA_IN, splitter_90)


def test_chopped_subtraction_evidence_and_weights(chopped):
    assert 6.5e-4 <= chopped.detect_probability <= 7.5e-4
    assert chopped.mode is CatKind.SUBTRACTED
    assert chopped.kappa_prime == pytest.approx(-0.7)
    assert chopped.counts[0] == 4
    assert chopped.trivial_weight == 0.0
    assert chopped.weight_of(4) == pytest.approx(0.84, abs=0.01)
    assert chopped.weight_of(5) == pytest.approx(0.143, abs=0.01)
    assert chopped.weight_of(6) == pytest.approx(0.015, abs=0.005)
    assert chopped.weight_of(2) == 0.0
    assert float(np.sum(chopped.weights)) == pytest.approx(1.0, abs=1e-12)


def test_binomial_addition_probability(binomial_added, splitter_90):
    assert 0.015 <= binomial_added.detect_probability <= 0.025
    src = BinomialSource(4, 0.8)
    expected = math.fsum(
        binomial_pmf(src, n0)
        * prob_added(n0, KAPPA_IN, splitter_90.transmittance, splitter_90.reflectance)
        for n0 in range(5)
    )
    assert binomial_added.detect_probability == pytest.approx(expected, rel=1e-12)
    assert binomial_added.counts == (0, 1, 2, 3, 4)
    assert binomial_added.weight_of(4) == pytest.approx(0.8**4)
    assert binomial_added.trivial_weight == pytest.approx(0.2**4)


def test_bayes_weighting_reweights_by_production(splitter_90):
    src = BinomialSource(4, 0.8)
    source = mixed_added(src, KAPPA_IN, splitter_90, weighting="source")
    bayes = mixed_added(src, KAPPA_IN, splitter_90, weighting="bayes")
    t, r = splitter_90.transmittance, splitter_90.reflectance
    ratio = prob_added(3, KAPPA_IN, t, r) / prob_added(4, KAPPA_IN, t, r)
    assert bayes.weight_of(3) / bayes.weight_of(4) == pytest.approx(
        ratio * source.weight_of(3) / source.weight_of(4), rel=1e-10
    )
    assert bayes.detect_probability == pytest.approx(source.detect_probability)


def test_ideal_many_channel_detector_approaches_pure_state(splitter_90):
    mixture = mixed_subtracted(ChoppingDetector(2000, 1.0), 4, KAPPA_IN, splitter_90)
    target = cat_state(CatParams(mixture.kappa_prime, 4, CatKind.SUBTRACTED))
    assert mixture.fidelity_to(target) >= 0.99


def test_near_perfect_source_approaches_pure_state(splitter_90):
    src = BinomialSource(4, 1.0 - 1e-8)
    mixture = mixed_added(src, KAPPA_IN, splitter_90)
    target = cat_state(CatParams(mixture.kappa_prime, 4, CatKind.ADDED))
    assert mixture.fidelity_to(target) >= 1.0 - 1e-6


def test_mixture_is_linear_in_components(chopped):
    expected = math.fsum(
        w * wigner(CatParams(chopped.kappa_prime, c, CatKind.SUBTRACTED), 0.0, 0.0)
        for c, w in zip(chopped.counts, chopped.weights)
    )
    assert float(chopped.wigner(0.0, 0.0)) == pytest.approx(expected, rel=1e-12)


def test_mixture_closed_forms_match_density_matrix(binomial_added):
    x = np.linspace(-3, 3, 7)
    p = np.linspace(2, -2, 7)
    mixture = binomial_added
    numeric = mixture.wigner(x, p, numeric=True)
    assert np.allclose(mixture.wigner(x, p), numeric, atol=1e-6)
    numeric = mixture.husimi(x, p, numeric=True)
    assert np.allclose(mixture.husimi(x, p), numeric, atol=1e-8)
    assert np.allclose(
        mixture.quad_dist(x, 0.4), mixture.quad_dist(x, 0.4, numeric=True), atol=1e-8
    )


def test_chopped_mixture_keeps_fringes(chopped):
    rows = quad_slice(chopped.quad_dist, 0.0, n=400)
    assert count_interior_minima(rows[:, 1]) >= 2


def test_subtraction_prior(splitter_90):
    prior = subtraction_prior(KAPPA_IN, splitter_90)
    assert prior.sum() >= 1.0 - 1e-10
    # the reflected mode alone has odd photon numbers too
    assert prior[1] > 0.0
    with pytest.warns(TruncationWarning):
        subtraction_prior(KAPPA_IN, splitter_90, max_count=2)


def test_source_validation(splitter_90):
    with pytest.raises(DomainError):
        BinomialSource(-1, 0.5)
    with pytest.raises(DomainError):
        BinomialSource(4, 1.0)
    with pytest.raises(DomainError):
        mixed_added(BinomialSource(2, 0.5), KAPPA_IN, splitter_90, weighting="prior")


def test_mixed_conditional_validation():
    vacuum = make_fock(0, 0)
    with pytest.raises(ValueError):
        MixedConditional((0,), np.array([0.5]), (vacuum,), 1.0, 0.5, 0.0, CatKind.ADDED)
    with pytest.raises(ValueError):
        MixedConditional(
            (0, 1), np.array([1.0]), (vacuum,), 1.0, 1.0, 0.0, CatKind.ADDED
        )


def test_preset_squeeze_probabilities(splitter_90):
    chopped = mixed_subtracted(ChoppingDetector(20, 0.95), 4, KAPPA_PRESET, splitter_90)
    assert chopped.kappa_prime == pytest.approx(-0.693, abs=1e-12)
    assert chopped.detect_probability == pytest.approx(6.10657e-4, rel=1e-4)
    # the 0.07% level is reached at kappa' = -0.7; d ln P / d ln|kappa'| is about 13
    assert chopped.detect_probability < 6.5e-4
    added = mixed_added(BinomialSource(4, 0.8), KAPPA_PRESET, splitter_90)
    assert added.detect_probability == pytest.approx(0.01771, rel=1e-3)


def test_mixed_fringe_peak_never_exceeds_pure(chopped):
    pure = CatParams(chopped.kappa_prime, 4, CatKind.SUBTRACTED)
    axis = np.linspace(-4, 4, 81)
    x, p = np.meshgrid(axis, axis, indexing="ij")
    values = wigner(pure, x, p)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    peak = float(values[i, j])
    assert peak == pytest.approx(1.0 / math.pi, rel=1e-9)
    assert float(chopped.wigner(x[i, j], p[i, j])) <= peak + 1e-12


def test_more_channels_concentrate_the_mixture(splitter_90):
    weights = []
    for n in (5, 10, 20, 200):
        mixture = mixed_subtracted(ChoppingDetector(n, 0.95), 4, KAPPA_IN, splitter_90)
        weights.append(mixture.weight_of(4))
    assert all(a < b for a, b in zip(weights, weights[1:]))


def test_bayes_mixture_matches_density_pipeline(splitter_90):
    src = BinomialSource(4, 0.8)
    kappa, n_max = -0.4, 34
    signal = DensityMatrix.from_vector(make_squeezed_vacuum(kappa, 30).resized(n_max))
    populations = np.zeros(n_max + 1)
    populations[: src.n_trials + 1] = [
        binomial_pmf(src, n0) for n0 in range(src.n_trials + 1)
    ]
    reference = DensityMatrix.diagonal_state(populations)
    rho_out = apply_beam_splitter(DensityMatrix.tensor(signal, reference), splitter_90)
    heralded = condition_on_count(rho_out, 0)

    mixture = mixed_added(src, kappa, splitter_90, weighting="bayes")
    assert heralded.probability == pytest.approx(mixture.detect_probability, rel=1e-8)
    assert fidelity(heralded.state, mixture.density_matrix()) >= 1.0 - 1e-6
    expected = mixture.density_matrix().resized(n_max).entries
    assert np.allclose(heralded.state.entries, expected, atol=1e-8)
