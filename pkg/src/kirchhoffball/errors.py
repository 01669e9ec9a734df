"""Exception types shared across the package."""


class KirchhoffError(Exception):
    """Base class for all package errors."""


class InvalidAmplitude(KirchhoffError):
    """Shooting amplitude is not a positive number."""


class NonFiniteBlowup(KirchhoffError):
    """The ODE state left the configured magnitude bound."""


class NoSolutionFound(KirchhoffError):
    """No amplitude bracket produced u(R) = 0 in the scanned range."""


class NotARoot(KirchhoffError):
    """Reconstruction requested at an alpha that does not satisfy f(alpha) = 1."""

    def __init__(self, f_value: float, tolerance: float):
        self.f_value = f_value
        self.mismatch = abs(f_value - 1.0)
        super().__init__(
            f"|f(alpha) - 1| = {self.mismatch:.3e} exceeds tolerance {tolerance:.3e}"
        )


class ProjectionUndefined(KirchhoffError):
    """The scalar Nehari projection has no positive solution for this iterate."""


class NotConverged(KirchhoffError):
    """Energy minimization exhausted its budget; the last iterate is attached."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class ConvergenceNotReached(KirchhoffError):
    """Endpoint extrapolation is not Cauchy at the requested tolerance."""


class UnsupportedRegime(KirchhoffError):
    """Parameters fall outside every enumerated existence case."""


class GridTooCoarseWarning(UserWarning):
    """The scan grid may have missed sign changes of f - 1."""
