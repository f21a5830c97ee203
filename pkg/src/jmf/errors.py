"""Exception hierarchy shared by every module."""


class JMFError(Exception):
    """Base class for all library errors."""


class NonFiniteSample(JMFError, ArithmeticError):
    """A sampled function value was inf or nan."""


class TruncationInsufficient(JMFError, ArithmeticError):
    """The last retained series term is larger than the requested tolerance."""


class RadiusTooLarge(JMFError, ValueError):
    """A Cauchy circle would enclose (or touch) a known singularity."""


class PoleCollision(JMFError, ValueError):
    """An evaluation point lies on (or too close to) a pole or lattice point."""


class PathThroughPole(JMFError, ValueError):
    """The canonical integration path for h_l runs through a pole."""


class LeadingCoefficientVanishes(JMFError, ArithmeticError):
    """The declared top Laurent coefficient is numerically zero."""


class ParseError(JMFError, ValueError):
    """A form description does not follow the grammar."""


class IndexNotIntegral(JMFError, ValueError):
    """The exponent sum of a theta quotient is odd."""


class IndexNotPositive(JMFError, ValueError):
    """The exponent sum of a theta quotient is not positive."""


class StepUnderflow(JMFError, ArithmeticError):
    """Nested finite differences lost too many significant digits."""


class HeatPreconditionFailed(JMFError, ValueError):
    """The heat operator does not annihilate the supplied kernel."""


class BandContainsPole(JMFError, ValueError):
    """A pole line lies inside the requested expansion band."""


class LeadingZero(JMFError, ZeroDivisionError):
    """A q-series with vanishing leading coefficient cannot be inverted."""
