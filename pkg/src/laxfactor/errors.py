"""Exception types raised across the package."""


class LaxFactorError(Exception):
    """Base class for all package errors."""


class NonConvergent(LaxFactorError, ArithmeticError):
    """A series or quadrature did not reach the requested accuracy."""


# alias used by the quadrature helpers
NonConverged = NonConvergent


class ThetaOverflow(LaxFactorError, OverflowError):
    """The dominant theta-series term does not fit in double precision."""


class NearSingular(LaxFactorError, ValueError):
    """An argument lies within the pole exclusion radius of a singularity."""

    def __init__(self, message, *, point=None, pair=None):
        super().__init__(message)
        self.point = point
        self.pair = pair


class DegenerateConfiguration(NearSingular):
    """Coincident coordinates make an intertwining matrix singular."""


class PoleOrderTooHigh(LaxFactorError, ValueError):
    """A residue was requested at a pole of order two or more."""


class RankDeficiencyViolation(LaxFactorError, ValueError):
    """A matrix expected to have rank one does not."""


class MissingDynamical(LaxFactorError, ValueError):
    """A dynamical R-matrix was requested without dynamical coordinates."""


class CollisionDetected(LaxFactorError, RuntimeError):
    """Two particles came closer than the exclusion radius during integration."""

    def __init__(self, message, *, time=None, pair=None):
        super().__init__(message)
        self.time = time
        self.pair = pair


class StepUnderflow(LaxFactorError, RuntimeError):
    """Adaptive step size fell below the minimum allowed value."""


class ConfigError(LaxFactorError, ValueError):
    """Invalid command-line or suite configuration."""
