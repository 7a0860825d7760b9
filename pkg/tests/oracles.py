"""Independent reference computations used across the test modules."""

import math

import numpy as np


def hermite_explicit(n: int, z: complex) -> complex:
    """H_n(z) = n! sum_k (-1)^k (2z)^(n-2k) / (k! (n-2k)!)."""
    return math.factorial(n) * sum(
        (-1) ** k
        * (2 * z) ** (n - 2 * k)
        / (math.factorial(k) * math.factorial(n - 2 * k))
        for k in range(n // 2 + 1)
    )


def annihilation_matrix(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def ladder_state(
    amplitudes: np.ndarray, transmittance: complex, count: int, added: bool
):
    """Operator-sum reference: normalized (a^dag)^count T^n psi or a^count T^n psi,
    built from explicit matrices on a space large enough to hold the result."""
    size = amplitudes.size + count
    psi = np.zeros(size, dtype=complex)
    psi[: amplitudes.size] = amplitudes * transmittance ** np.arange(amplitudes.size)
    a = annihilation_matrix(size - 1)
    operator = a.conj().T if added else a
    for _ in range(count):
        psi = operator @ psi
    return psi / np.linalg.norm(psi)


def sample_chopping(n_channels: int, efficiency: float, m: int, trials: int, seed: int):
    """Monte Carlo click distribution: thin m photons, drop them into channels.

    Lost photons are marked -1; a click is each new channel in a sorted row.
    """
    rng = np.random.default_rng(seed)
    surviving = rng.binomial(m, efficiency, size=trials)
    channels = rng.integers(0, n_channels, size=(trials, m))
    channels = np.where(np.arange(m) < surviving[:, None], channels, -1)
    channels.sort(axis=1)
    fresh = channels >= 0
    fresh[:, 1:] &= channels[:, 1:] != channels[:, :-1]
    clicks = fresh.sum(axis=1)
    return np.bincount(clicks, minlength=n_channels + 1) / trials
