"""Exception hierarchy shared by the library and the command line front end."""


class SupportFactorError(Exception):
    """Base class for all errors raised by :mod:`supportfactor`."""

    exit_code = 1


class InvalidInputError(SupportFactorError, ValueError):
    """Malformed input: bad interval bounds, mismatched grids, unparsable files."""

    exit_code = 2


class InvalidDistributionError(SupportFactorError, ValueError):
    """The object does not describe a probability distribution (mass, monotonicity)."""

    exit_code = 3


class NumericError(SupportFactorError, ArithmeticError):
    """A numeric routine (quadrature, root bracketing) failed to produce a usable value."""

    exit_code = 4
