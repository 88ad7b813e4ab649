"""Exception hierarchy shared by every module."""


class BeltramiLabError(Exception):
    """Base class for all errors raised by the package."""


class GridMismatch(BeltramiLabError, ValueError):
    """Two fields (or a field and a mask) live on different grids."""


class NonFiniteField(BeltramiLabError, ValueError):
    """A field was constructed from samples containing NaN or inf."""


class NonZeroMean(BeltramiLabError, ValueError):
    """The periodic dbar-problem has no solution for data with nonzero mean."""


class NoConvergence(BeltramiLabError, RuntimeError):
    """The contraction iteration exceeded its geometric iteration budget."""


class SupportViolation(BeltramiLabError, ValueError):
    """A dilatation is not supported where the caller promised it would be."""


class EllipticityViolation(BeltramiLabError, ValueError):
    """max |mu| >= 1, so mu is not a Beltrami coefficient."""


class LogBranchFailure(BeltramiLabError, RuntimeError):
    """dzf vanishes or winds too fast between neighbouring samples."""


class NewtonStall(BeltramiLabError, RuntimeError):
    """Newton inversion of the map did not converge."""


class NonPositiveWeight(BeltramiLabError, ValueError):
    """A weight is zero, negative or non-finite where it must be positive."""


class WeightOverflow(BeltramiLabError, OverflowError):
    """An exponential weight leaves the double-precision range."""


class DegenerateBoundary(BeltramiLabError, ValueError):
    """Two distinct boundary nodes coincide."""


class DomainTooLarge(BeltramiLabError, ValueError):
    """A domain does not fit in the central half of the periodic window."""


class NotStarShaped(BeltramiLabError, ValueError):
    """Boundary points are not a radial graph about the requested center."""


class ConfigError(BeltramiLabError, ValueError):
    """An experiment configuration is malformed or out of range."""
