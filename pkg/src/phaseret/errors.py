"""Exception hierarchy shared across the recovery pipelines.

Every declared failure mode of a recovery routine is a distinct subclass of
:class:`RecoveryError` so that callers (and the experiment harness) can report
machine-readable failure kinds.  Precondition violations, malformed files and
bad arguments raise plain :class:`ValueError` instead.
"""

__all__ = [
    "RecoveryError",
    "TooSmall",
    "NoCandidate",
    "SupportInconsistent",
    "Disconnected",
    "NoOddCycle",
    "NegativeSquare",
    "VerificationFailed",
    "InfeasibleSpec",
    "AmbiguousSupport",
    "NotRankOne",
    "SolverFailed",
    "NoConvergence",
    "RootPairingFailed",
    "NotSymmetric",
]


class RecoveryError(Exception):
    """Base class for declared recovery failures (never wrong answers)."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class TooSmall(RecoveryError):
    """The lag set has too few positive elements to locate extreme distances."""


class NoCandidate(RecoveryError):
    """No admissible candidate for the second-to-extreme distance exists."""


class SupportInconsistent(RecoveryError):
    """A reconstructed support fails its pairwise-distance consistency check."""


class Disconnected(RecoveryError):
    """The graph of uniquely-realized distances is disconnected."""


class NoOddCycle(RecoveryError):
    """The graph of uniquely-realized distances is bipartite."""


class NegativeSquare(RecoveryError):
    """An odd-cycle weight ratio that should be a squared value is not positive."""


class VerificationFailed(RecoveryError):
    """A recovered signal does not reproduce the input autocorrelation."""


class InfeasibleSpec(RecoveryError):
    """A relaxation was requested with parameters it cannot satisfy."""


class AmbiguousSupport(RecoveryError):
    """The solved relaxation has no clear support pattern on its diagonal."""


class NotRankOne(RecoveryError):
    """A solved matrix that should be (numerically) rank one is not."""


class SolverFailed(RecoveryError):
    """The convex solver stopped without reaching its tolerances."""


class NoConvergence(RecoveryError):
    """Root finding stopped before meeting its residual bound."""


class RootPairingFailed(RecoveryError):
    """Polynomial roots could not be grouped into conjugate/inverse sets."""


class NotSymmetric(ValueError):
    """A matrix argument that must be symmetric is not."""
