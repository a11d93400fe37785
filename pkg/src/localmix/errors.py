"""Exception hierarchy shared by every module."""


class LocalMixError(Exception):
    """Base class for all errors raised by localmix."""


class InvalidInputError(LocalMixError, ValueError):
    """Malformed or out-of-range input (dimensions, node ids, probabilities)."""


class DegenerateConditioningError(LocalMixError, ValueError):
    """Conditioning on a set that carries zero probability."""


class CapacityExceededError(LocalMixError):
    """Exact enumeration or simulation requested beyond the supported size."""


class AxiomViolationError(LocalMixError):
    """A component breaks locality, invariance or stochasticity."""


class UnsupportedFamilyError(LocalMixError):
    """The requested graph family is not supported by this construction."""


class InternalError(LocalMixError, RuntimeError):
    """A state that valid inputs cannot produce (e.g. an infeasible LP)."""
