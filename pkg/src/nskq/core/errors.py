"""Exception hierarchy for nskq.

Every error derives from :class:`NskqError` and from the builtin exception a
caller would naturally expect, so ``except ValueError`` keeps working for
validation failures and ``except RuntimeError`` for numerical ones.
"""


class NskqError(Exception):
    """Base class for all nskq errors."""


class InvalidFieldError(NskqError, ValueError):
    """Spectral coefficients are malformed (wrong shape, NaN/Inf, broken symmetry)."""


class LatticeMismatchError(NskqError, ValueError):
    """Fields that must share a frequency lattice do not."""


class EmptyTrajectoryError(NskqError, ValueError):
    """A time-indexed quantity has no samples."""


class ModelParameterError(NskqError, ValueError):
    """Physical parameters produce a non-decaying linear evolution."""


class DivergentIntegralError(NskqError, ValueError):
    """Quadrature requested for an integral that diverges."""


class UnknownGeneratorError(NskqError, ValueError):
    """Initial-data generator name is not registered."""


class SnapshotFormatError(NskqError, ValueError):
    """Snapshot file or JSON document cannot be decoded."""


class SaturationError(NskqError, OverflowError):
    """An exponential frequency weight exceeds the floating-point range."""


class QuadratureToleranceError(NskqError, RuntimeError):
    """Quadrature did not reach the requested tolerance."""


class StabilityError(NskqError, RuntimeError):
    """Explicit time step violates the integrator's stability limit."""
