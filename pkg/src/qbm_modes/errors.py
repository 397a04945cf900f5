"""Exception and warning types shared across the package."""


class QbmError(Exception):
    """Base class for all errors raised by qbm_modes."""


class ValidationError(QbmError, ValueError):
    """Invalid construction arguments (bad spectral table, T <= 0, ...)."""


class DomainError(QbmError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(QbmError, ValueError):
    """Query outside the tabulated/grid range; never clamped silently."""


class PhysicalityError(QbmError, ValueError):
    """Inputs violate a physical positivity constraint (n < 0, N < 0, ...)."""


class SingularityError(QbmError, ArithmeticError):
    """A propagator denominator vanished exactly with no regulator."""


class PreconditionError(QbmError, ValueError):
    """A documented operation precondition does not hold."""


class RootNotFoundError(QbmError, RuntimeError):
    """On-shell search found no root inside the grid range."""


class StabilityError(QbmError, RuntimeError):
    """Integrator step size violates its stability bound."""


class GridTooSmallError(QbmError, RuntimeError):
    """Phase-space grid leaks too much probability through its boundary."""


class ResolutionWarning(UserWarning):
    """Grid too coarse for a structural scale (e.g. a Drude cutoff)."""


class StatisticalPowerWarning(UserWarning):
    """Ensemble too small for the requested confidence."""


class KernelConsistencyWarning(UserWarning):
    """Kernel data deviates from the Kramers-Kronig-consistent form."""
