"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """An argument violates an operation's preconditions."""


class DimensionError(InvalidInputError):
    """Matrix or vector dimensions are not conformable."""


class IllConditionedCombinerError(ValueError):
    """W^H W is numerically singular in the rate evaluation."""


class InfeasibleSplitError(ValueError):
    """A column has entries larger than 2*d_max and cannot be split."""


class DegenerateChannelError(ValueError):
    """Every candidate in a phase search scored -inf."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""
