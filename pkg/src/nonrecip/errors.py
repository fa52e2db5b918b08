"""Exception hierarchy shared by all modules."""


class NonrecipError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(NonrecipError, ValueError):
    """Parameters violate a documented precondition."""


class DomainError(InvalidInputError, ZeroDivisionError):
    """A formula would divide by zero for the given parameters."""


class IntegrationError(NonrecipError, ArithmeticError):
    """The adaptive integrator could not reach ``t_end``.

    Attributes
    ----------
    t_last : float
        Last time at which a step was accepted.
    """

    def __init__(self, message, t_last):
        super().__init__(f"{message} (last good t={t_last!r})")
        self.t_last = t_last


class PoleError(NonrecipError, ArithmeticError):
    """Scattering denominator vanished (resonant divergence)."""


class BandEdgeError(InvalidInputError):
    """Group velocity vanishes, so flows are undefined."""


class NoPropagatingModeError(InvalidInputError):
    """The requested energy lies outside a waveguide's band."""


class NoHalfMaxError(NonrecipError, ArithmeticError):
    """Half-maximum equation has no root on the physical branch."""
