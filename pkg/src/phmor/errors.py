"""Exception hierarchy shared by all phmor modules."""


class PhmorError(Exception):
    """Base class for all errors raised by phmor."""


class DimensionError(PhmorError):
    """Matrix or vector dimensions are inconsistent."""


class IllConditionedError(PhmorError):
    """A transformation matrix is numerically singular."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class NotSymmetricError(PhmorError):
    """A matrix required to be symmetric is not."""


class IndefiniteMatrixError(PhmorError):
    """A matrix required to be positive (semi)definite is not."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotHurwitzError(PhmorError):
    """A matrix required to be asymptotically stable has an eigenvalue
    with nonnegative real part."""

    def __init__(self, message, max_real_part=None):
        super().__init__(message)
        self.max_real_part = max_real_part


class IndexTooHighError(PhmorError):
    """The differentiation index exceeds what the requested decoupling
    supports (the algebraic pencil block is singular)."""


class RankAmbiguityError(PhmorError):
    """Singular values straddle the rank cutoff; the rank decision is
    not numerically well separated."""

    def __init__(self, message, gap_ratio=None):
        super().__init__(message)
        self.gap_ratio = gap_ratio


class NotApplicableError(PhmorError):
    """The requested reduction method does not apply to this system
    (e.g. a singular skew-symmetric pivot block)."""


class NotStableError(PhmorError):
    """The dynamic part of the system is not asymptotically stable."""


class ShiftAtPoleError(PhmorError):
    """The interpolation shift coincides with a system pole."""


class PoleError(PhmorError):
    """The transfer function resolvent is singular at the requested point."""


class UnboundedError(PhmorError):
    """The requested norm is unbounded for this system."""


class ConfigError(PhmorError):
    """Invalid benchmark or run configuration."""
