"""Exception hierarchy.

The CLI maps these onto exit codes: ``HypothesisFailure`` subclasses give 1,
``ResourceError`` subclasses give 3.
"""


class ExpsumError(Exception):
    """Base class for all library errors."""


class ResourceError(ExpsumError):
    """A computation hit a size or degree bound; raising the bound may help."""


class BudgetExceeded(ResourceError):
    """Enumeration would visit more points than the configured budget."""


class NotStabilized(ResourceError):
    """A dimension sequence did not stabilize within the allowed bound."""


class CokernelTailError(ResourceError):
    """The cokernel contributions did not end in a zero window before r_max."""


class SeriesTooShort(ExpsumError):
    """A power series is shorter than the requested certification depth."""


class HypothesisFailure(ExpsumError):
    """A theorem hypothesis is violated (a verdict, not a bug)."""


class PositiveDimensional(HypothesisFailure):
    """The common zero set of the partials is not finite."""


class CertificateMismatch(ExpsumError):
    """Points found by scanning do not account for the scheme degree."""


class WrongBranch(ExpsumError):
    """A theorem check was called on a job routed to the other theorem."""


class ParseError(ExpsumError, ValueError):
    """Polynomial source text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NoStabilization(HypothesisFailure):
    """A local quotient dimension kept growing: the critical point is not isolated."""
