"""End-to-end certificate orchestration.

`certify` resolves parameters at a requested (or default) speed decrement,
builds the profiles, and runs the operator and corner verifications; on an
infeasible ledger or a failed pointwise check the decrement backs off
geometrically (guided by the ledger's headroom hints) and the chain retries.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import LedgerInfeasible, VerificationError
from ..models import ModelSpec
from ..waves import WaveProfile
from . import build, params as params_mod, verify

DELTA0_FRACTION = 0.02
MAX_ATTEMPTS = 60
STRICT_TOL = 1e-11  # the accept gate: worst values must be nonpositive to
                    # within the evaluation noise floor, not just the report's
                    # +1e-8 grace


@dataclass
class CertificateBundle:
    params: params_mod.CertificateParams
    profiles: tuple            # (W1,) scalar or (U1, V1)
    reports: tuple             # one CertificateReport per operator
    corners: tuple             # corner-check lists matching `profiles`
    attempts: int

    @property
    def passed(self):
        ops = all(r.passed for r in self.reports)
        corners = all(c.passed for cs in self.corners for c in cs)
        ledger = all(e.satisfied for e in self.params.ledger)
        return ops and corners and ledger

    def summary(self):
        lines = [f"recipe {self.params.recipe}, c = {self.params.c:.6g}, "
                 f"delta0 = {self.params.delta0:.3e} "
                 f"({self.attempts} attempt(s))"]
        for rep in self.reports:
            lines.append(f"operator {rep.op} ({rep.sign}): "
                         f"{'pass' if rep.passed else 'FAIL'}")
            for r in rep.regions:
                tag = " marginal" if r.marginal else ""
                lines.append(f"  [{r.lo:9.4g}, {r.hi:9.4g}] {r.label:34s} "
                             f"worst {r.worst: .3e}{tag}")
        for prof, cs in zip(self.profiles, self.corners):
            for c in cs:
                tag = " tangential" if c.tangential else ""
                lines.append(f"corner at {c.position:9.4g} ({prof.label}): "
                             f"margin {c.margin: .3e} "
                             f"{'pass' if c.passed else 'FAIL'}{tag}")
        lines.append("ledger:")
        lines.append(self.params.ledger_table())
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _verify_bundle(spec, base, cert_params, profiles):
    c_eff = cert_params.c_eff
    if cert_params.recipe == "scalar":
        op = "N1" if spec.family == "nonlocal" else "N1-local"
        rep = verify.verify_operator(op, profiles[0], spec, c_eff, "<=0")
        corners = (verify.corner_check(profiles[0], "super"),)
        return (rep,), corners
    rep2 = verify.verify_operator("N2", profiles, spec, c_eff, "<=0")
    rep3 = verify.verify_operator("N3", profiles, spec, c_eff, ">=0")
    corners = (verify.corner_check(profiles[0], "super"),
               verify.corner_check(profiles[1], "sub"))
    return (rep2, rep3), corners


def certify(spec: ModelSpec, base: WaveProfile, delta0: Optional[float] = None,
            recipe: Optional[str] = None,
            max_attempts: int = MAX_ATTEMPTS) -> CertificateBundle:
    """Full chain: parameters, construction, verification, with the speed
    decrement backed off until the certificate verifies.

    Raises HypothesisUnmet for fast-decay bases (the recipes cannot launch)
    and LedgerInfeasible when no decrement in the ladder verifies.
    """
    if delta0 is None:
        delta0 = DELTA0_FRACTION * base.c
    tail = None
    attempt = 0
    last_err = None
    while attempt < max_attempts:
        attempt += 1
        try:
            cert_params = params_mod.solve_params(spec, base, delta0,
                                                  recipe=recipe, tail=tail)
            tail = cert_params.tail
            profiles = build.build_supersolution(spec, base, cert_params)
            if cert_params.recipe == "scalar":
                profiles = (profiles,)
            reports, corners = _verify_bundle(spec, base, cert_params, profiles)
            bundle = CertificateBundle(params=cert_params, profiles=profiles,
                                       reports=reports, corners=corners,
                                       attempts=attempt)
            strict = all(
                (r.worst <= STRICT_TOL if rep.sign == "<=0"
                 else r.worst >= -STRICT_TOL)
                for rep in reports for r in rep.regions)
            if bundle.passed and strict:
                return bundle
            last_err = VerificationError(
                "pointwise strictness not reached at delta0 = "
                f"{delta0:.3e}: " + "; ".join(
                    f"{rep.op} worst {max(abs(c.worst) for c in rep.regions):.3e}"
                    for rep in reports))
            delta0 = 0.25 * delta0
        except LedgerInfeasible as err:
            last_err = err
            hint = err.delta0_hint
            delta0 = min(0.5 * delta0, hint) if hint else 0.5 * delta0
    raise LedgerInfeasible(
        f"no verifiable certificate after {max_attempts} attempts "
        f"(last: {last_err})")
