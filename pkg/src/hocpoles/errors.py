"""Exception hierarchy shared by the estimation pipeline."""


class HocPolesError(Exception):
    """Base class for all package errors."""


class ModelError(HocPolesError, ValueError):
    """Invalid or unusable model specification."""


class UnstableModelError(ModelError):
    """Denominator has roots on or outside the unit circle."""


class DataError(HocPolesError, ValueError):
    """Input data cannot be used (non-finite, too short, zero variance)."""


class ConfigMismatchError(HocPolesError, ValueError):
    """A restored or merged state was built with a different configuration."""


class NumericalError(HocPolesError, ArithmeticError):
    """A numerical step failed to produce a usable answer."""


class IllConditionedError(NumericalError):
    """The lag matrix is too close to singular to solve reliably.

    ``estimate`` holds a least-squares fallback solution when one could be
    computed, so callers that prefer degraded output can still use it.
    """

    def __init__(self, cond, estimate=None):
        super().__init__(f"lag matrix is ill-conditioned (cond={cond:.3g})")
        self.cond = cond
        self.estimate = estimate


class RootFindingError(NumericalError):
    """Polynomial roots did not converge to the residual tolerance."""


class UndefinedDampingError(NumericalError):
    """Damping ratio of a real pole pair is undefined (non-positive product)."""
