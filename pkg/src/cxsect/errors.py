"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input (bad dimension, parameter range, schema)."""


class ConvexityError(InvalidInputError):
    """A parametric body failed its convexity certification."""


class NumericalEvaluationError(RuntimeError):
    """An integrand or pipeline produced non-finite or unusable values."""
