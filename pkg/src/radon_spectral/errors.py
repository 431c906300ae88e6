"""Exception hierarchy shared by all modules."""


class RadonSpectralError(Exception):
    """Base class for all package errors."""


class DomainError(RadonSpectralError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(RadonSpectralError, ValueError):
    """A request exceeds a configured capability (degree cap, derivative order)."""


class UsageError(RadonSpectralError, TypeError):
    """Inputs are well-formed individually but inconsistent with each other."""


class ConsistencyError(RadonSpectralError, RuntimeError):
    """An internal invariant was violated (e.g. broken conjugate symmetry)."""
