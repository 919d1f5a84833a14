class ValidationError(ValueError):
    """Input violates a structural invariant (shape, normalisation, hermiticity)."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class NumericalFailure(RuntimeError):
    """A solver could not produce a result meeting its contract."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class InfeasibleError(NumericalFailure):
    """No feasible point was found; ``context['mismatch']`` holds the best residual."""


class ResourceError(RuntimeError):
    """The requested enumeration is too large to build."""


class ConstructionError(RuntimeError):
    """A hard-coded construction failed its own consistency checks."""
