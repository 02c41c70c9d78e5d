"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter point lies outside the natural parameter space."""


class DegenerateMetricError(ValueError):
    """The Fisher metric is not (numerically) positive definite."""


class DerivativeOrderError(ValueError):
    """A family cannot supply log-partition derivatives of the requested order."""


class ExpansionInvalidError(ArithmeticError):
    """The truncated expansion is non-positive, so its logarithm is meaningless."""
