"""Exception types shared across the package."""


class CoslabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CoslabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PoleProximityError(DomainError):
    """A query interval comes too close to the pole of the kernel at 0 or 2*pi."""


class ParameterError(CoslabError, ValueError):
    """Invalid or inconsistent parameters (bad sizes, ranges, sweep syntax)."""


class InconsistencyError(CoslabError, RuntimeError):
    """Internal cross-check failed: a certified count contradicts sign data."""


class IntervalCountExceeded(CoslabError, RuntimeError):
    """The envelope-set interval count exceeded its proven ceiling (a bug)."""


class RankError(CoslabError, ValueError):
    """Least-squares design matrix is singular; the fit is underdetermined."""
