"""Exception hierarchy shared by all modules."""


class TontineError(Exception):
    """Base class for errors raised by riccati_tontine."""


class NonFiniteError(TontineError, ArithmeticError):
    """A numerical state became NaN or infinite."""


class NoBracketError(TontineError, ValueError):
    """Root finder called on an interval without a sign change."""


class DegenerateDenominatorError(TontineError, ArithmeticError):
    """A denominator fell below its safety floor."""


class NoConvergenceError(TontineError, RuntimeError):
    """An iterative solver hit its iteration cap."""


class NegativeVarianceError(TontineError, ArithmeticError):
    """Second moment minus squared mean is materially negative."""


class InvalidGammaError(TontineError, ValueError):
    """Risk aversion value not supported by the requested formula."""


class HazardCapError(TontineError, ValueError):
    """Hazard cap does not exceed the hazard at the horizon."""


class OutOfRangeError(TontineError, ValueError):
    """A derived quantity lies outside its admissible range."""


class InvalidConfigError(TontineError, ValueError):
    """A run configuration violates a precondition."""
