"""Exception types raised by the solvers."""


class CamoscatError(Exception):
    """Base class for all package errors."""


class ValidationError(CamoscatError, ValueError):
    """Scene or configuration rejected before any numerics run."""


class ScaleSeparationViolated(ValidationError):
    pass


class GeometryViolated(ValidationError):
    pass


class NumericalError(CamoscatError):
    """A solver failed to reach its accuracy contract."""


class NonConvergence(NumericalError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class TruncationTooTight(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


class SingularInterfaceSystem(NumericalError):
    pass


class DegenerateDispersion(NumericalError):
    pass


class AssemblySingular(NumericalError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NearBoundary(CamoscatError, ValueError):
    pass


class ResidualTooHigh(NumericalError):
    pass


class WindowOutsideGrid(CamoscatError, ValueError):
    pass
