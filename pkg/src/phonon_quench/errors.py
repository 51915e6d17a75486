"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`PhononQuenchError`; the CLI maps the two top-level families to
exit codes (configuration problems -> 2, numerical problems -> 3).
"""


class PhononQuenchError(Exception):
    """Base class for all package errors."""


class ConfigError(PhononQuenchError, ValueError):
    """Malformed, unknown or missing configuration entries."""


class NumericalError(PhononQuenchError):
    """Failures that arise while building or solving a model."""


class DomainError(NumericalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SizingError(NumericalError):
    """A sector or matrix is larger than a configured cap."""


class MembershipError(NumericalError, ValueError):
    """A Fock state does not belong to the sector it is looked up in."""


class RangeError(NumericalError, IndexError):
    """An ordinal or site index is out of range."""


class SpecError(NumericalError, ValueError):
    """Model couplings are inconsistent with the sector."""


class DimensionError(NumericalError, ValueError):
    """A vector has the wrong length for an operator."""


class InputError(NumericalError, ValueError):
    """Invalid input data (unnormalized state, empty series, ...)."""


class ConvergenceError(NumericalError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
