"""Exception types raised across the package."""


class DecayError(Exception):
    """Base class for every error raised by gamow_decay."""


class NonPositiveStrength(DecayError, ValueError):
    pass


class NonPositiveRadius(DecayError, ValueError):
    pass


class InvalidMode(DecayError, ValueError):
    pass


class OutOfRange(DecayError, ValueError):
    pass


class NoConvergence(DecayError, ArithmeticError):
    pass


class DerivativeVanished(DecayError, ArithmeticError):
    pass


class ConvergedToTrivialRoot(DecayError, ArithmeticError):
    pass


class MissedPole(DecayError):
    pass


class DuplicatePole(DecayError):
    pass


class BoundaryTooCloseToZero(DecayError):
    pass


class NonIntegerWinding(DecayError, ArithmeticError):
    pass


class DegenerateNormalizer(DecayError, ArithmeticError):
    pass


class ModelMismatch(DecayError, ValueError):
    pass


class QuadratureFailure(DecayError, ArithmeticError):
    pass


class AsymmetricFamily(DecayError, ValueError):
    pass


class SizeMismatch(DecayError, ValueError):
    pass


class NegativeTime(DecayError, ValueError):
    pass


class RegimeViolation(DecayError, ValueError):
    pass


class FaddeevaOverflow(DecayError, OverflowError):
    pass


class PathDisagreement(DecayError, ArithmeticError):
    pass


class NonPositiveSample(DecayError, ValueError):
    pass


class WindowTooSmall(DecayError, ValueError):
    pass


class StabilityBudgetExceeded(DecayError, ValueError):
    pass


class ReflectionDetected(DecayError):
    pass


class InvalidGrid(DecayError, ValueError):
    """Oracle grid geometry or sampling times violate a precondition."""


class ConfigError(DecayError, ValueError):
    """Malformed or inconsistent run configuration."""
