"""Machine-checked super/sub-solution certificates: piecewise recipes,
parameter ledgers, and pointwise operator verification."""

from .build import build_subsolution, build_supersolution
from .params import (
    CertificateParams,
    LedgerEntry,
    claim36_delta4,
    solve_params,
)
from .pieces import BaseFunction, Descriptor, Piece, PiecewiseProfile
from .pipeline import CertificateBundle, certify
from .verify import (
    CertificateReport,
    CornerCheck,
    RegionCheck,
    corner_check,
    verify_operator,
)

__all__ = [
    "BaseFunction", "CertificateBundle", "CertificateParams",
    "CertificateReport", "CornerCheck", "Descriptor", "LedgerEntry", "Piece",
    "PiecewiseProfile", "RegionCheck", "build_subsolution",
    "build_supersolution", "certify", "claim36_delta4", "corner_check",
    "solve_params", "verify_operator",
]
