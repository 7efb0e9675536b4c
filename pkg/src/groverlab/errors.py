"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument is outside the domain the operation is defined on."""


class NoSolutionsError(ParameterError):
    """The operation needs at least one marked item."""


class DegenerateAngleError(ParameterError):
    """The rotation angle is 0 or pi/2, where the requested formula is undefined."""


class DimensionError(ValueError):
    """Register sizes of the operands do not fit together."""


class SizeLimitError(ValueError):
    """The requested register exceeds the desk-scale memory cap."""


class NormDriftError(RuntimeError):
    """A state lost normalisation, which means a simulator bug."""


class NotUnitaryError(ValueError):
    """A supplied operator is not unitary within tolerance."""


class InvariantViolation(RuntimeError):
    """A proven inequality failed numerically (simulator-bug signal)."""
