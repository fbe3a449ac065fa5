"""Exception hierarchy shared by all modules."""


class ComplexScalingError(Exception):
    """Base class for every error raised by this package."""


class PoleError(ComplexScalingError, ValueError):
    """theta = -1, where theta' = 1/(theta+1)^2 has a pole."""


class NegativeRadiusError(ComplexScalingError, ValueError):
    pass


class DegenerateJacobianError(ComplexScalingError, ValueError):
    """|psi_theta'(u)| vanished; theta is outside the admissible region."""


class InvalidThetaError(ComplexScalingError, ValueError):
    pass


class GridError(ComplexScalingError, ValueError):
    """Invalid grid size, or a grid that does not reach past the scaling radius."""


class SupportError(ComplexScalingError, ValueError):
    """A potential or vector violates its support constraint."""


class SupportOverflowError(ComplexScalingError, ValueError):
    """A constructed function would not fit on the supplied grid."""


class DimensionMismatchError(ComplexScalingError, ValueError):
    pass


class CapExceededError(ComplexScalingError, ValueError):
    """Dense work requested above the desk-scale dimension cap."""


class ConvergenceError(ComplexScalingError, RuntimeError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SingularMatrixError(ComplexScalingError, RuntimeError):
    def __init__(self, message, pivot=None):
        super().__init__(message)
        self.pivot = pivot


class NearSpectrumError(ComplexScalingError, RuntimeError):
    """A resolvent was requested too close to the computed spectrum."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class NonAnalyticVectorError(ComplexScalingError, TypeError):
    pass


class ConfigError(ComplexScalingError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
