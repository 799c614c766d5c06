"""Exception hierarchy shared across the package."""


class SignalHorizonError(Exception):
    """Base class for all package errors."""


class ConfigError(SignalHorizonError, ValueError):
    """Invalid configuration or argument domain."""


class InfeasibleError(ConfigError):
    """Requested qubit count / locality exceeds the enumeration or dense limits."""


class NumericalError(SignalHorizonError, ArithmeticError):
    """A numerical routine failed (non-Hermitian input, no convergence, ...)."""


class EigensolverError(NumericalError):
    pass


class HorizonError(NumericalError):
    """The signal amplitude is zero, so no finite shot budget resolves it."""


class DegenerateOutcomeError(NumericalError):
    """A two-outcome measurement is deterministic; Fisher information is undefined."""
