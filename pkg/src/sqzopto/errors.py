"""Exception hierarchy shared by every stage of the pipeline."""


class SqzOptoError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SqzOptoError, ValueError):
    """Invalid parameter file, unknown key, or malformed value."""


class ThresholdExceeded(SqzOptoError, ValueError):
    """The OPA is pumped at or above its parametric threshold (|2 Xi_d| >= Delta_c)."""


class NonConvergence(SqzOptoError, RuntimeError):
    """The mean-field fixed-point iteration did not reach tolerance."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class ZeroCoupling(SqzOptoError, ZeroDivisionError):
    """Enhancement factor requested for a vanishing linearized coupling G_j."""


class Unstable(SqzOptoError, RuntimeError):
    """The moment system has no attracting steady state."""

    def __init__(self, message, spectral_abscissa=None):
        super().__init__(message)
        self.spectral_abscissa = spectral_abscissa


class SingularSystem(SqzOptoError, RuntimeError):
    """The steady-state linear system could not be solved."""


class StepTooLarge(SqzOptoError, ValueError):
    """Integration step does not resolve the fastest time scale of the drift."""


class NonHermitianMoments(SqzOptoError, ValueError):
    """Moment vector violates the reality / conjugate-pairing identities."""


class ComplexBranch(SqzOptoError, ValueError):
    """Negative discriminant in the two-mode symplectic eigenvalue formula."""


class MonogamyViolation(SqzOptoError, ArithmeticError):
    """A residual contangle is clearly negative."""


class DegenerateProjection(SqzOptoError, ValueError):
    """A two-quadrature marginal has (numerically) vanishing determinant."""


class NumericalError(SqzOptoError, ArithmeticError):
    """A non-finite value appeared in an intermediate result."""


class StageError(SqzOptoError):
    """Wraps an error with the name of the pipeline stage that raised it."""

    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"{stage}: {type(error).__name__}: {error}")
