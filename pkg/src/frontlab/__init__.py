"""frontlab: numerical laboratory for monostable traveling fronts.

Implements the three model families (local reaction-diffusion, nonlocal
dispersal, two-species competition), their traveling-wave solvers, Cauchy
dynamics, tail-decay classification (pulled / pushed / noncritical), and
machine-checked super/sub-solution certificates.
"""

from .errors import (
    BlowUp,
    BracketFailure,
    ComplexRoots,
    ConfigError,
    ConvergenceError,
    DiscontinuityDetected,
    FrontLabError,
    HypothesisUnmet,
    InsufficientData,
    LedgerInfeasible,
    MathDomainError,
    MonotonicityLost,
    NoConvergence,
    NoCrossing,
    NoRealRoots,
    SignConditionFailed,
    UnresolvedPiece,
    VerificationError,
    WindowTooNoisy,
)
from .models import (
    Kernel,
    LVParams,
    ModelSpec,
    Nonlinearity,
    PRESET_NAMES,
    cosine_kernel,
    hadeler_rothe,
    kpp_nonlinearity,
    preset,
    tabulated_nonlinearity,
    triangular_kernel,
    uniform_kernel,
    validate,
)

__version__ = "0.1.0"
