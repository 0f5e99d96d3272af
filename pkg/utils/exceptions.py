"""
Exception hierarchy shared by every app.
"""


class CovertAoiError(Exception):
    """
    Base class for all domain errors raised by the optimizer.
    """


class ScenarioError(CovertAoiError):
    """
    A scenario file could not be parsed or violates an invariant.

    Attributes:
        field: Name of the offending scenario field, or None for parse errors
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

    def __str__(self):
        message = super().__str__()
        if self.field:
            return f"{self.field}: {message}"
        return message


class GeometryError(CovertAoiError):
    """
    Degenerate geometry, e.g. a zero distance between transmitter and target.
    """


class InfeasibleError(CovertAoiError):
    """
    A subproblem or the joint problem has no feasible point.

    Attributes:
        binding: Name of the violated constraint or slot acting as witness
    """

    def __init__(self, message, binding=None):
        super().__init__(message)
        self.binding = binding

    def __str__(self):
        message = super().__str__()
        if self.binding:
            return f"{message} (binding: {self.binding})"
        return message


class AnchorDomainError(CovertAoiError):
    """
    A successive-approximation anchor lies outside the surrogate's domain.
    """


class SolverError(CovertAoiError):
    """
    The conic solver stopped without a usable answer.

    Attributes:
        residuals: Mapping of constraint name to violation at the last iterate
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}
