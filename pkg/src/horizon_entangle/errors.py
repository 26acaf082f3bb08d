"""Exception hierarchy shared by the library and the command line."""


class HorizonEntangleError(Exception):
    """Base class for all library errors."""


class DomainError(HorizonEntangleError, ValueError):
    """An input lies outside the physical domain (non-positive mass, R0 <= 1, ...)."""


class HorizonLimitError(DomainError):
    """The squeezing parameter reached the horizon limit tanh q = 1."""


class TruncationError(HorizonEntangleError):
    """No admissible Fock truncation meets the requested tolerance."""


class UsageError(HorizonEntangleError, ValueError):
    """Malformed call: bad subsystem index, wrong shape, bad keep-set."""


class InvalidStateError(HorizonEntangleError, ValueError):
    """A matrix is not a valid density matrix (negative spectrum)."""


class ConsistencyError(HorizonEntangleError, AssertionError):
    """Two independent computational routes disagree."""
