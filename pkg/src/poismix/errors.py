"""Exception hierarchy shared by all poismix modules."""


class PoismixError(Exception):
    """Base class for every error raised by poismix."""


class QuadratureError(PoismixError, ArithmeticError):
    """A numerical integral failed to converge or diverges."""


class TruncationError(PoismixError, ArithmeticError):
    """An integrand tail could not be bounded below the requested tolerance."""


class NonIntegrableError(TruncationError):
    """The modulus of a characteristic function is not (provably) integrable."""


class TableExhaustedError(PoismixError):
    """A probability table never reached the requested cumulative mass."""


class TailTruncationError(PoismixError):
    """The discretized Levy table needs more entries than the configured cap."""


class MaxIterationsError(PoismixError):
    """A rejection sampler exceeded its rejection budget."""


class ConditionViolatedError(PoismixError):
    """The exponential domination bound behind the gamma-proposal sampler failed."""


class BetaSolveError(PoismixError):
    """No neighbourhood radius could be found for the tempering function."""


class MissingMomentError(PoismixError, ValueError):
    """A bound was requested without the moments it depends on."""


class DegenerateCdfError(PoismixError, ValueError):
    """A reference cdf is not a usable distribution function."""
