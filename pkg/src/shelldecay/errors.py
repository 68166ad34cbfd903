"""Exception hierarchy shared by every module."""


class DecayError(Exception):
    """Base class for all errors raised by :mod:`shelldecay`."""


class DomainError(DecayError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class OverflowUnrepresentable(DecayError, ArithmeticError):
    """The true value exceeds the double-precision range.

    Raised instead of silently returning ``inf``; callers are expected to
    rescale or drop the offending term.
    """


class NoConvergence(DecayError):
    """An iterative method exhausted its iteration budget."""


class QuadrantEscape(DecayError):
    """A pole iterate left the lower half-plane or collapsed onto k = 0."""


class MissingPole(DecayError):
    """The argument-principle count disagrees with the list of located poles."""


class SymmetryViolation(DecayError):
    """The mirrored pole -conj(kappa) is not a zero of the Jost function."""


class NearDegenerate(DecayError):
    """A resonant overlap denominator vanishes (signals a corrupted pole)."""


class DegeneratePair(DecayError):
    """Two modes cannot be compared because kappa_n + kappa_m vanishes."""


class ConvergenceDomain(DecayError, ValueError):
    """Resonant sums were requested at radii where they do not converge."""


class ToleranceNotMet(DecayError):
    """Quadrature could not reach the requested tolerance.

    Attributes
    ----------
    value : complex
        Best available estimate of the integral.
    error : float
        The achieved a-posteriori error estimate.
    """

    def __init__(self, message, value=complex("nan"), error=float("inf")):
        super().__init__(message)
        self.value = value
        self.error = error


class ConfigError(DecayError, ValueError):
    """A run configuration could not be parsed or failed validation."""
