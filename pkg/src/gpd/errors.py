"""Exception hierarchy shared by the library and the command line."""


class GpdError(Exception):
    """Base class for all errors raised by :mod:`gpd`."""


class DomainError(GpdError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(GpdError, ValueError):
    """Invalid quadrature order, rule kind, sample size or similar setting."""


class SingularityError(DomainError):
    """A density was requested exactly at one of its singular points."""


class OverflowRiskError(GpdError, ArithmeticError):
    """An exponent would overflow double precision."""
