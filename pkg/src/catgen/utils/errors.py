"""Exception hierarchy shared by the library and the CLI."""

from typing import Dict, Optional


class CatgenError(Exception):
    """Base class for all catgen failures."""


class ConfigError(CatgenError, ValueError):
    """Scenario file missing, malformed, or inconsistent."""


class DomainError(CatgenError, ValueError):
    """Parameter outside its mathematical domain (|kappa| >= 1, k > N, ...)."""


class TruncationError(DomainError):
    """Fock index beyond the truncation n_max."""


class ZeroNormError(CatgenError, ArithmeticError):
    """Normalization requested for a vector with zero norm."""


class ImprobableOutcomeError(CatgenError):
    """Conditioning outcome whose probability is below the improbable threshold."""

    def __init__(self, message: str, probability: float = 0.0):
        super().__init__(message)
        self.probability = probability


class ImpossibleEventError(ImprobableOutcomeError):
    """Detector event with vanishing Bayes evidence."""


class ConvergenceError(CatgenError, ArithmeticError):
    """Series evaluation exceeded its term budget."""


class ToleranceError(CatgenError):
    """Analytic and numeric paths disagree beyond the configured tolerance."""

    def __init__(self, message: str, deviations: Optional[Dict[str, float]] = None):
        super().__init__(message)
        self.deviations = deviations or {}


class TruncationWarning(UserWarning):
    """Amplitude mass pushed past n_max and dropped."""
