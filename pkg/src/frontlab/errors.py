"""Exception taxonomy.

Exit-code mapping used by the CLI: 1 config, 2 math-domain,
3 convergence, 4 verification failure.
"""


class FrontLabError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(FrontLabError):
    exit_code = 1


class MathDomainError(FrontLabError):
    exit_code = 2


class ComplexRoots(MathDomainError):
    """Characteristic roots are complex: the speed is below the linear speed."""


class NoRealRoots(MathDomainError):
    """No real root of the dispersion relation at this speed."""


class ConvergenceError(FrontLabError):
    exit_code = 3


class NoConvergence(ConvergenceError):
    """Newton (with the damping restart ladder) failed to converge."""


class BracketFailure(ConvergenceError):
    """Speed bisection could not bracket the existence threshold."""


class MonotonicityLost(ConvergenceError):
    """A solution was found but it is not monotone; reported, never accepted."""

    def __init__(self, message, profile=None):
        super().__init__(message)
        self.profile = profile


class BlowUp(ConvergenceError):
    """Simulation left the invariant region by more than the instability tolerance."""


class NoCrossing(MathDomainError):
    """State never crosses the requested front-tracking level."""


class InsufficientData(MathDomainError):
    """Not enough snapshots in the requested fitting window."""


class WindowTooNoisy(ConvergenceError):
    """Tail-fit residual above threshold: the profile is not converged enough."""


class VerificationError(FrontLabError):
    exit_code = 4


class HypothesisUnmet(VerificationError):
    """The base wave does not exhibit the slow-decay tail the recipe requires."""


class LedgerInfeasible(VerificationError):
    """A certificate constraint chain cannot be satisfied at the requested speed decrement."""

    def __init__(self, message, delta0_hint=None):
        super().__init__(message)
        self.delta0_hint = delta0_hint


class DiscontinuityDetected(VerificationError):
    """A built piecewise profile is discontinuous at a junction (ledger bug)."""


class SignConditionFailed(VerificationError):
    """Endpoint signs of the junction-selection function are wrong."""


class UnresolvedPiece(VerificationError):
    """A piece of the certificate profile is narrower than three grid nodes."""
