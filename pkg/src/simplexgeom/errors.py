"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class ValidationError(ValueError):
    """A structured input (matrix, frame, config) fails a consistency check."""


class DegenerateInputError(ValueError):
    """Input vectors are (numerically) linearly dependent."""


class SamplingError(RuntimeError):
    """A sampler kept hitting a probability-zero degenerate draw."""
