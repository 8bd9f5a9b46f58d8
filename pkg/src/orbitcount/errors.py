"""Exception hierarchy.

Three branches matter to callers (and map to CLI exit codes):
validation errors (bad inputs, exit 1), numerical failures (exit 2),
and enumeration budget overflow (exit 3).
"""


class OrbitCountError(Exception):
    """Base class for all library errors."""


# -- Validation ---------------------------------------------------------------

class ValidationError(OrbitCountError):
    """Input or mode violates a documented precondition."""


class NonPositiveLength(ValidationError):
    pass


class ProbabilitySumExceedsOne(ValidationError):
    def __init__(self, vertex, total):
        self.vertex = vertex
        self.total = total
        super().__init__(
            f"probabilities leaving vertex {vertex} sum to {total!r} > 1"
        )


class IndexOutOfRange(ValidationError):
    pass


class MixedProbabilityAnnotation(ValidationError):
    pass


class MissingProbabilities(ValidationError):
    pass


class NotStronglyConnected(ValidationError):
    pass


class UnknownEdge(ValidationError):
    pass


class WrongMode(ValidationError):
    pass


class NonPositiveLambda(ValidationError):
    pass


class VolumeNotConserved(ValidationError):
    pass


class DomainError(ValidationError):
    """Evaluation point outside the convergence half-plane."""


# -- Numerical failures -------------------------------------------------------

class NumericalError(OrbitCountError):
    """A solver could not certify its result."""


class NotIrreducible(NumericalError):
    pass


class NotPrimitive(NumericalError):
    pass


class DidNotConverge(NumericalError):
    def __init__(self, iterations, message=""):
        self.iterations = iterations
        super().__init__(message or f"no convergence after {iterations} iterations")


class BracketFailure(NumericalError):
    pass


class SingularDenominator(NumericalError):
    pass


class PropertyViolated(NumericalError):
    def __init__(self, message, residuals=None):
        self.residuals = residuals or {}
        super().__init__(message)


# -- Enumeration budget -------------------------------------------------------

class BudgetOverflow(OrbitCountError):
    """The oracle hit its safety cap; results would be partial."""

    def __init__(self, emitted, message=""):
        self.emitted = emitted
        super().__init__(message or f"enumeration cap reached after {emitted} items")
