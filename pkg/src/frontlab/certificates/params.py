"""Certificate parameter resolution.

Each recipe resolves its rates, junctions, offsets, and amplitudes in
dependency order (rates, then junction scans, then offsets, then amplitudes
via continuity), records every constraint in a ledger, and re-checks the
whole ledger before returning.  Free parameters follow deterministic rules
(interval midpoints, fixed safety fractions, amplitude reduction ladders) so
identical inputs give identical certificates.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .. import spectral, tails
from ..errors import HypothesisUnmet, LedgerInfeasible, SignConditionFailed
from ..models import ModelSpec
from ..waves import WaveProfile

TAIL_HYPOTHESIS_TOL = 0.05
SCAN_MARGIN = 0.10


@dataclass
class LedgerEntry:
    name: str
    lhs: float
    sense: str
    rhs: float

    @property
    def satisfied(self):
        if self.sense == "<":
            return self.lhs < self.rhs
        if self.sense == "<=":
            return self.lhs <= self.rhs
        if self.sense == ">":
            return self.lhs > self.rhs
        return self.lhs >= self.rhs

    @property
    def margin(self):
        return (self.rhs - self.lhs) if self.sense in ("<", "<=") else (self.lhs - self.rhs)


@dataclass
class CertificateParams:
    recipe: str          # 'scalar' | 'lv_bgt1' | 'lv_blt1' | 'lv_beq1'
    family: str
    c: float
    delta0: float
    c_eff: float
    values: dict
    ledger: list
    tail: tails.TailFit

    def check_ledger(self):
        """Independent assertion pass: no constraint is trusted from
        construction."""
        bad = [e for e in self.ledger if not e.satisfied]
        if bad:
            raise LedgerInfeasible(
                "ledger violations: " + "; ".join(
                    f"{e.name}: {e.lhs:.6g} {e.sense} {e.rhs:.6g}" for e in bad))
        return True

    def ledger_table(self):
        lines = [f"{'constraint':42s} {'lhs':>14s} {'rhs':>14s} "
                 f"{'margin':>12s} verdict"]
        for e in self.ledger:
            lines.append(f"{e.name:42s} {e.lhs:14.6g} {e.rhs:14.6g} "
                         f"{e.margin:12.4g} {'pass' if e.satisfied else 'FAIL'}")
        return "\n".join(lines)


def _add(ledger, name, lhs, sense, rhs, hard=True, delta0_hint=None):
    e = LedgerEntry(name=name, lhs=float(lhs), sense=sense, rhs=float(rhs))
    ledger.append(e)
    if hard and not e.satisfied:
        raise LedgerInfeasible(
            f"constraint {name!r} infeasible: {e.lhs:.6g} {sense} {e.rhs:.6g}",
            delta0_hint=delta0_hint)
    return e


def _hypothesis_fit(base, lam_minus, lam_plus, component=0):
    fit = tails.fit_tail(base, side="+", component=component)
    rel = abs(fit.rate - lam_minus) / lam_minus
    if rel > TAIL_HYPOTHESIS_TOL:
        hint = ""
        if lam_plus is not None and abs(fit.rate - lam_plus) / lam_plus < 0.1:
            hint = (" (the tail matches the fast root instead: a pushed "
                    "minimal front, on which the recipe cannot launch)")
        raise HypothesisUnmet(
            f"base tail rate {fit.rate:.6g} is {100 * rel:.1f}% from the slow "
            f"root {lam_minus:.6g}{hint}")
    return fit


def _rightmost_prefix_point(xi, ok_mask):
    """Largest xi such that ok holds at every node to its left (inclusive)."""
    bad = np.where(~ok_mask)[0]
    last = len(xi) - 1 if len(bad) == 0 else bad[0] - 1
    if last < 0:
        return None
    return xi[last]


# ---------------------------------------------------------------------------
# scalar recipe (nonlocal operator, or its local second-order analog)


def solve_params_scalar(spec: ModelSpec, base: WaveProfile, delta0: float,
                        tail: Optional[tails.TailFit] = None) -> CertificateParams:
    f = spec.nonlinearity
    nonlocal_op = spec.family == "nonlocal"
    c = base.c
    ledger = []
    if nonlocal_op:
        pair = spectral.nonlocal_roots(spec.kernel, f.fp0, c)
        c_lin = spectral.linear_speed_nonlocal(spec.kernel, f.fp0)[0]
    else:
        pair = spectral.local_roots(f.fp0, c)
        c_lin = 2.0 * np.sqrt(f.fp0)
    if tail is None:
        tail = _hypothesis_fit(base, pair.lam_minus, pair.lam_plus)
    c_eff = c - delta0
    _add(ledger, "c* - delta0 > linear speed", c_eff, ">", c_lin,
         delta0_hint=0.5 * (c - c_lin))

    if nonlocal_op:
        pair_eff = spectral.nonlocal_roots(spec.kernel, f.fp0, c_eff)
    else:
        pair_eff = spectral.local_roots(f.fp0, c_eff)
    lam_star = 0.5 * (pair_eff.lam_minus + pair_eff.lam_plus)
    if nonlocal_op:
        psi = spec.kernel.laplace(lam_star) + f.fp0 - 1.0 - lam_star * c_eff
    else:
        psi = lam_star**2 - c_eff * lam_star + f.fp0
    _add(ledger, "dispersion margin at lambda*", psi, "<", 0.0)
    _add(ledger, "lambda* inside root interval",
         pair_eff.lam_minus, "<", lam_star)
    _add(ledger, "lambda* below fast root", lam_star, "<", pair_eff.lam_plus)

    K1 = 1.05 * f.sup_abs_fp(-0.02, 1.02)
    lam1_floor = max(4.0 * K1, K1 + 1.0) / c_eff
    lam1 = 1.1 * lam1_floor
    _add(ledger, "lambda1 > max(4K1, K1+1)/c*", lam1, ">",
         max(4.0 * K1, K1 + 1.0) / c)

    xi = base.grid.xi
    W = base.W
    fpW = f.fp(W)
    # region where the reaction is uniformly dissipative (the profile is deep
    # in the stable basin); 10% margin against the value at the stable state
    thresh = -SCAN_MARGIN * abs(f.fp1)
    xi2 = _rightmost_prefix_point(xi, fpW <= thresh)
    if xi2 is None or xi2 >= 0.0:
        xi2 = min(xi2 if xi2 is not None else -base.grid.h, -base.grid.h)
    mask2 = xi <= xi2
    K2 = -float(np.max(np.maximum(fpW[mask2], f.fp(W[mask2] + 0.01))))
    _add(ledger, "K2 > 0 (dissipative left region)", K2, ">", 0.0)

    mu_fit = tails.fit_tail(base, side="-").rate
    if nonlocal_op:
        L = spec.kernel.half_width
        g2 = lambda lam: 1.0 + K2 - np.exp(lam * L) - c * lam
    else:
        g2 = lambda lam: K2 - lam**2 - c * lam
    lam2_cap = brentq(g2, 1e-12, 50.0, xtol=1e-13)
    lam2 = 0.5 * min(mu_fit, lam2_cap)
    _add(ledger, "lambda2 < left rate mu", lam2, "<", mu_fit)
    if nonlocal_op:
        _add(ledger, "1 + K2 - e^(lambda2 L) - c* lambda2 > 0",
             1.0 + K2 - np.exp(lam2 * L) - c * lam2, ">", 0.0)
    else:
        _add(ledger, "K2 - lambda2^2 - c* lambda2 > 0",
             K2 - lam2**2 - c * lam2, ">", 0.0)

    # interface placement: the nonlinear correction must eat at most half of
    # the dispersion margin on the far-right piece
    wgrid = np.linspace(1e-9, 0.5, 2000)
    ok = np.abs(f.f(wgrid) - f.fp0 * wgrid) <= 0.5 * abs(psi) * wgrid
    bad = np.where(~ok)[0]
    w_cap = wgrid[-1] if len(bad) == 0 else wgrid[max(bad[0] - 1, 0)]
    candidates = xi[(W <= w_cap) & (xi > 0.0)]
    if len(candidates) == 0:
        raise LedgerInfeasible("no admissible far-right junction: profile "
                               "never small enough on xi > 0")
    xi1 = float(candidates[0])
    _add(ledger, "xi2 < 0 < xi1", xi2, "<", 0.0)
    _add(ledger, "xi1 positive", 0.0, "<", xi1)

    delta1_lo, delta1_hi = 1.0 / lam1, c_eff / (4.0 * K1)
    _add(ledger, "delta1 interval nonempty", delta1_lo, "<", delta1_hi)
    delta1 = float(np.sqrt(delta1_lo * delta1_hi))
    _add(ledger, "delta1 > 1/lambda1", delta1, ">", delta1_lo)
    delta2 = 0.5 * delta1
    _add(ledger, "xi2 + delta1 < xi1", xi2 + delta1, "<", xi1)

    if nonlocal_op:
        delta3 = 0.25 * min(c_eff / (2.0 * spec.kernel.half_width),
                            0.5 * np.pi / (delta1 + delta2))
    else:
        delta3 = 0.25 * min(1.0, 0.5 * np.pi / (delta1 + delta2))
    _add(ledger, "sine stays monotone on the junction band",
         delta3 * (delta1 + delta2), "<", 0.5 * np.pi)

    A0 = tail.amplitude
    lamq_minus = pair.lam_minus
    corner_cap = ((lam_star - lamq_minus) / (lam_star + lam1)
                  * A0 * np.exp(-(lamq_minus + lam1) * xi1))
    eps2 = 0.25 * corner_cap
    _add(ledger, "eps2 below the xi1 corner cap", eps2, "<", corner_cap)
    W_xi1 = float(base.eval(xi1))
    eps1 = (W_xi1 - eps2 * np.exp(lam1 * xi1)) * np.exp(lam_star * xi1)
    _add(ledger, "eps1 e^(-lambda* xi1) < W*(xi1)",
         eps1 * np.exp(-lam_star * xi1), "<", W_xi1)
    _add(ledger, "eps1 positive", 0.0, "<", eps1)
    eps3 = eps2 * np.exp(lam1 * (xi2 + delta1)) / np.sin(delta3 * delta1)
    eps4 = eps3 * np.sin(delta3 * delta2) / np.exp(lam2 * (xi2 - delta2))
    _add(ledger, "eps3 positive", 0.0, "<", eps3)
    _add(ledger, "eps4 positive", 0.0, "<", eps4)

    # left clamp junction: W* + eps4 e^(lambda2 xi) crosses 1 (refined off
    # the grid so the built profile is continuous there)
    one_minus = 1.0 - W
    grow = eps4 * np.exp(lam2 * xi)
    cross = np.where((one_minus - grow <= 0) & (xi < xi2 - delta2))[0]
    if len(cross):
        k = cross[-1]
        gap = lambda x: (1.0 - float(base.eval(x))) - eps4 * np.exp(lam2 * x)
        M1 = float(brentq(gap, xi[k], min(xi[k + 1], xi2 - delta2), xtol=1e-14))
    else:
        M1 = None

    # delta0 headroom estimates on the two exponential-modifier regions
    Wp = np.gradient(W, base.grid.h)
    sup_wp = float(np.max(np.abs(Wp)))
    C2 = c_eff * lam1 - 1.0 - K1
    _add(ledger, "(c*-delta0) lambda1 - 1 - K1 > 0", 0.0, "<", C2)
    head2 = C2 * eps2 * np.exp(lam1 * (xi2 + delta1)) / sup_wp
    _add(ledger, "delta0 within far-interface headroom", delta0, "<", head2,
         delta0_hint=0.5 * head2)
    if nonlocal_op:
        X4 = 1.0 + K2 - np.exp(lam2 * L) - c_eff * lam2
    else:
        X4 = K2 - lam2**2 - c_eff * lam2
    m4 = xi <= xi2 - delta2
    if M1 is not None:
        m4 &= xi >= M1
    ratio4 = np.min(eps4 * np.exp(lam2 * xi[m4]) / np.maximum(np.abs(Wp[m4]), 1e-30))
    head4 = X4 * ratio4
    _add(ledger, "delta0 within left-region headroom", delta0, "<", head4,
         delta0_hint=0.5 * min(head2, head4))

    values = dict(lam_star=lam_star, lam1=lam1, lam2=lam2, K1=K1, K2=K2,
                  xi1=xi1, xi2=xi2, delta1=delta1, delta2=delta2,
                  delta3=delta3, eps1=eps1, eps2=eps2, eps3=eps3, eps4=eps4,
                  M1=M1, A0=A0, psi_margin=psi,
                  lam_minus=pair.lam_minus, lam_plus=pair.lam_plus)
    params = CertificateParams(recipe="scalar", family=spec.family, c=c,
                               delta0=delta0, c_eff=c_eff, values=values,
                               ledger=ledger, tail=tail)
    params.check_ledger()
    return params


# ---------------------------------------------------------------------------
# competition recipes


def _lv_common_rates(lv, c, delta0, ledger):
    c_eff = c - delta0
    _add(ledger, "c* - delta0 > linear speed", c_eff, ">", lv.linear_speed,
         delta0_hint=0.5 * (c - lv.linear_speed))
    roots = spectral.lv_roots(lv, c)
    roots_eff = spectral.lv_roots(lv, c_eff)
    lam1 = 0.5 * (roots_eff.lambda_minus + roots_eff.lambda_plus)
    C2 = -(lam1**2 - c_eff * lam1 + (1.0 - lv.a))
    _add(ledger, "lambda1 strictly between the u-roots", 0.0, "<", C2)
    lam_v_eff = (c_eff + np.sqrt(c_eff**2 + 4 * lv.r * lv.d)) / (2 * lv.d)
    lam2 = 0.5 * min(roots.lambda_v_cap, lam_v_eff)
    _add(ledger, "lambda2 < Lambda_v", lam2, "<", roots.lambda_v_cap)
    C3 = -(lv.d * lam2**2 - c_eff * lam2 - lv.r)
    _add(ledger, "v-dispersion margin at lambda2", 0.0, "<", C3)
    lam3 = 0.5 * min(roots.lambda_minus, 0.5 * c_eff)
    _add(ledger, "lambda3 < min(lambda_u^-, (c*-delta0)/2)",
         lam3, "<", min(roots.lambda_minus, 0.5 * c_eff))
    q3 = lam3**2 - c_eff * lam3 + (1.0 - lv.a)
    _add(ledger, "u-dispersion positive at lambda3", 0.0, "<", q3)
    delta3 = 0.25 * min(1.0, c_eff / (2.0 + 2.0 * lv.a))
    x_plus = -np.sqrt(1 - lv.a) + np.sqrt(1 - lv.a + 3.0)
    lam4 = 1.12 * max(x_plus, (delta3**2 + 1.0 + 2.0 * lv.a) / c_eff)
    C1 = lam4**2 + 2.0 * np.sqrt(1.0 - lv.a) * lam4 - 3.0
    _add(ledger, "lambda4^2 + 2 sqrt(1-a) lambda4 - 3 = C1 > 0", 0.0, "<", C1)
    delta2_lo = 1.0 / lam4
    delta2_hi = c_eff / (delta3**2 + 1.0 + 2.0 * lv.a)
    _add(ledger, "1/lambda4 < delta2 interval", delta2_lo, "<", delta2_hi)
    delta2 = float(np.sqrt(delta2_lo * delta2_hi))
    delta1 = 0.5 / (lam3 + lam4)
    _add(ledger, "delta1 < 1/(lambda3+lambda4)", delta1, "<", 1.0 / (lam3 + lam4))
    _add(ledger, "sine monotone band", delta3 * delta2, "<", 0.5 * np.pi)
    return dict(c_eff=c_eff, roots=roots, roots_eff=roots_eff, lam1=lam1,
                lam2=lam2, lam3=lam3, lam4=lam4, C1=C1, C2=C2, C3=C3, q3=q3,
                delta1=delta1, delta2=delta2, delta3=delta3)


def _lv_scan_xi_star(lv, base, com, ledger):
    xi, U, V = base.grid.xi, base.U, base.V
    one_minus_v = 1.0 - V
    # suffix supremum of 1 - V
    sup_right = np.maximum.accumulate(one_minus_v[::-1])[::-1]
    cap = min(com["C2"] / (4.0 * lv.a), com["C3"] / (8.0 * lv.r))
    ok = np.where((sup_right <= cap) & (xi > 0.0))[0]
    if len(ok) == 0:
        raise LedgerInfeasible("no admissible far-right junction xi*")
    return float(xi[ok[0]]), cap


def _lv_scan_xi1(lv, base, com, ledger):
    # the exact expansion leaves the stabilizer q3 + a(1-V*) - 2U* on the
    # linear-exponential region; half of q3 is kept as margin
    xi, U, V = base.grid.xi, base.U, base.V
    junk = 2.0 * U - lv.a * (1.0 - V)
    sup_right = np.maximum.accumulate(junk[::-1])[::-1]
    ok = np.where((sup_right <= 0.5 * com["q3"]) & (xi > 0.0))[0]
    if len(ok) == 0:
        raise LedgerInfeasible("no admissible junction xi1: the quadratic "
                               "slack never dominates the nonlinear terms")
    return float(xi[ok[0]])


def _trusted_left_start(base):
    """Scans must not trust the clamped boundary zone, where targets are
    enforced exactly and the profile's asymptotics are polluted."""
    xi = base.grid.xi
    return xi[0] + max(10 * base.grid.h, 0.08 * max(-xi[0], 1.0))


def _lv_scan_xi2(lv, base, rho, b_regime, ledger):
    xi, U, V = base.grid.xi, base.U, base.V
    start = _trusted_left_start(base)
    s1 = 1.0 - 2.0 * U - lv.a * V
    if b_regime == "b>1":
        r1 = -1.0 + 2.0 * rho
        s2 = 1.0 - 2.0 * V - lv.b * U
        r2 = -(1.0 - lv.b) + lv.b * rho
    elif b_regime == "b<1":
        r1 = (lv.a - 1.0) / (1.0 - lv.a * lv.b) + 2.0 * rho
        s2 = 1.0 - 2.0 * V - lv.b * U
        r2 = (lv.b - 1.0) / (1.0 - lv.a * lv.b) + lv.b * rho
    else:  # b = 1: only the first inequality enters the construction
        r1 = -1.0 + 2.0 * rho
        s2 = None
        r2 = None
    margin1 = SCAN_MARGIN * rho
    ok = (s1 <= r1 - margin1) | (xi < start)
    if s2 is not None:
        ok &= (s2 <= r2 - margin1) | (xi < start)
    xi2 = _rightmost_prefix_point(xi, ok)
    if xi2 is None or xi2 >= 0.0:
        if xi2 is None:
            raise LedgerInfeasible("no admissible junction xi2 for the "
                                   "equilibrium-side inequalities")
        xi2 = -base.grid.h
    trust = (xi <= xi2) & (xi >= start)
    _add(ledger, "equilibrium-side inequality 1 (margin)",
         float(np.max(s1[trust])), "<=", r1 - margin1)
    if s2 is not None:
        _add(ledger, "equilibrium-side inequality 2 (margin)",
             float(np.max(s2[trust])), "<=", r2 - margin1)
    return float(xi2)


def _amplitude_ladder(start, cond, max_rungs=18):
    """Reduce an amplitude by factors of 10 until cond(a) passes."""
    a = start
    for _ in range(max_rungs):
        if cond(a):
            return a
        a /= 10.0
    raise LedgerInfeasible("amplitude-smallness ladder exhausted")


def solve_params_lv(spec: ModelSpec, base: WaveProfile, delta0: float,
                    tail: Optional[tails.TailFit] = None) -> CertificateParams:
    lv = spec.lv
    c = base.c
    ledger = []
    roots = spectral.lv_roots(lv, c)
    if tail is None:
        tail = _hypothesis_fit(base, roots.lambda_minus, roots.lambda_plus)
    com = _lv_common_rates(lv, c, delta0, ledger)
    c_eff = com["c_eff"]
    xi, U, V = base.grid.xi, base.U, base.V
    h = base.grid.h
    Up = np.gradient(U, h)
    Vp = np.gradient(V, h)

    if lv.b > 1.0:
        recipe = "lv_bgt1"
        rho_cap = min(0.5, (lv.b - 1.0) / lv.b)
        rho = 0.25 * rho_cap
        # the delta_u/delta_v interval must be nonempty at this rho
        _add(ledger, "a b rho < (1-2rho)(b-1-b rho)",
             lv.a * lv.b * rho, "<", (1 - 2 * rho) * (lv.b - 1 - lv.b * rho))
        regime = "b>1"
    elif lv.b < 1.0:
        recipe = "lv_blt1"
        cap1 = (1 - lv.a) * (1 - lv.b) / ((1 - lv.a * lv.b) * (lv.a + lv.b))
        cap2 = (1 - lv.a) * (1 - lv.b) / (2 * (1 - lv.a * lv.b))
        rho = 0.25 * min(cap1, cap2)
        regime = "b<1"
    else:
        recipe = "lv_beq1"
        rho = 0.3   # scan device only at b = 1; anything below 1/2 works
        regime = "b=1"

    xi_star0, vcap = _lv_scan_xi_star(lv, base, com, ledger)
    xi1 = _lv_scan_xi1(lv, base, com, ledger)
    xi1 = max(xi1, 0.5 * base.grid.h)
    xi_star = max(xi_star0, xi1 + com["delta1"] + 1.0)
    xi2 = _lv_scan_xi2(lv, base, rho, regime, ledger)
    if regime == "b=1":
        # the degenerate construction additionally needs 1-U-V < 0 and
        # 1-U-aV > 0 to the left of xi2 (with margin), and xi2+delta2 < 0
        s3 = 1.0 - U - V
        s4 = 1.0 - U - lv.a * V
        start = _trusted_left_start(base)
        cap3 = _rightmost_prefix_point(xi, (s3 < 0.0) | (xi < start))
        cap4 = _rightmost_prefix_point(xi, (s4 > 0.0) | (xi < start))
        # the weighted approach-to-1 curve must still be increasing on the
        # whole band, so the band must end left of its hump
        theta0 = 0.5
        wgt = np.power(np.maximum(-xi, 1e-300), theta0) * (1.0 - U)
        incr = np.concatenate([[True], np.diff(wgt) >= -1e-12])
        cap5 = _rightmost_prefix_point(xi, incr | (xi < start))
        if cap3 is None or cap4 is None or cap5 is None:
            raise LedgerInfeasible("degenerate-regime sign scans failed")
        xi2 = min(xi2, cap3 - 1.0, cap4 - 1.0,
                  cap5 - com["delta2"] - 0.5, -com["delta2"] - 1.0)
    _add(ledger, "xi2 < 0 < xi1 < xi*", xi2, "<", 0.0)
    _add(ledger, "junction order", xi1 + com["delta1"], "<", xi_star)

    lam1, lam2, lam3, lam4 = com["lam1"], com["lam2"], com["lam3"], com["lam4"]
    delta1, delta2, delta3 = com["delta1"], com["delta2"], com["delta3"]
    U_star = float(base.eval(xi_star, component=0))
    corner_cap = ((lam1 - roots.lambda_minus) * U_star * np.exp(lam3 * xi_star)
                  / (1.0 + (lam1 - lam3) * (xi_star - xi1)))
    eps2 = 0.25 * corner_cap
    _add(ledger, "eps2 below the xi* corner cap", eps2, "<", corner_cap)
    eps1 = (U_star - eps2 * (xi_star - xi1) * np.exp(-lam3 * xi_star)) \
        * np.exp(lam1 * xi_star)
    _add(ledger, "eps1 positive", 0.0, "<", eps1)
    _add(ledger, "R_u(xi*) below U*(xi*)",
         eps2 * (xi_star - xi1) * np.exp(-lam3 * xi_star), "<", U_star)
    eps3 = eps2 * delta1 * np.exp(-lam3 * (xi1 + delta1)) \
        / np.exp(lam4 * (xi1 + delta1))
    eps4 = eps3 * np.exp(lam4 * (xi2 + delta2)) / np.sin(delta2 * delta3)
    _add(ledger, "eps3 positive", 0.0, "<", eps3)
    _add(ledger, "eps4 positive", 0.0, "<", eps4)

    # R_u on the linear-exponential and exponential regions (for delta_v caps)
    m2 = (xi >= xi1 + delta1) & (xi <= xi_star)
    Ru_region2 = eps2 * (xi[m2] - xi1) * np.exp(-lam3 * xi[m2])
    ru_min = float(np.min(Ru_region2)) if np.any(m2) else eps2 * delta1
    sup_up = float(np.max(np.abs(Up)))
    sup_vp = float(np.max(np.abs(Vp)))

    values = dict(lam1=lam1, lam2=lam2, lam3=lam3, lam4=lam4,
                  C1=com["C1"], C2=com["C2"], C3=com["C3"],
                  delta1=delta1, delta2=delta2, delta3=delta3,
                  xi_star=xi_star, xi1=xi1, xi2=xi2, rho=rho,
                  eps1=eps1, eps2=eps2, eps3=eps3, eps4=eps4,
                  lam_minus=roots.lambda_minus, lam_plus=roots.lambda_plus,
                  A0=tail.amplitude)

    if regime == "b>1":
        t_lo = lv.a / (1.0 - 2.0 * rho)
        t_hi = (lv.b - 1.0 - lv.b * rho) / (lv.b * rho)
        _add(ledger, "delta_u/delta_v interval nonempty", t_lo, "<", t_hi)
        t_mid = float(np.sqrt(t_lo * t_hi))

        def cond(eta1):
            dv = eta1 * np.exp(-lam2 * xi_star)
            du = t_mid * dv
            return (dv <= 0.02 * ru_min and du <= 0.9 * eps4 * np.sin(delta3 * delta2)
                    and eta1 * np.exp(-lam2 * xi_star) <= vcap)

        eta1 = _amplitude_ladder(1e-3, cond)
        delta_v = eta1 * np.exp(-lam2 * xi_star)
        delta_u = t_mid * delta_v
        delta4 = np.arcsin(delta_u / eps4) / delta3
        _add(ledger, "delta4 in (0, delta2)", delta4, "<", delta2)
        _add(ledger, "a delta_v < (1-2rho) delta_u",
             lv.a * delta_v, "<", (1 - 2 * rho) * delta_u)
        _add(ledger, "b rho delta_u < (b-1-b rho) delta_v",
             lv.b * rho * delta_u, "<", (lv.b - 1 - lv.b * rho) * delta_v)
        values.update(eta1=eta1, delta_u=delta_u, delta_v=delta_v, delta4=delta4)
    elif regime == "b<1":
        ratio = lv.b / lv.a  # delta_v = b delta_u / a

        def cond(eta1):
            dv = eta1 * np.exp(-lam2 * xi_star)
            du = dv / ratio
            return (dv <= 0.02 * ru_min and du <= 0.9 * eps4 * np.sin(delta3 * delta2)
                    and dv <= vcap and dv < lv.v_star and du < 1.0 - lv.u_star)

        eta1 = _amplitude_ladder(1e-3, cond)
        delta_v = eta1 * np.exp(-lam2 * xi_star)
        delta_u = delta_v / ratio
        delta4 = np.arcsin(delta_u / eps4) / delta3
        _add(ledger, "delta4 in (0, delta2)", delta4, "<", delta2)
        _add(ledger, "delta_v = b delta_u / a",
             abs(delta_v - lv.b * delta_u / lv.a), "<=", 1e-14 * delta_v)
        us, vs = lv.u_star, lv.v_star
        _add(ledger, "shifted-equilibrium inequality 1",
             lv.b * delta_u * ((1 - lv.b) / (1 - lv.a * lv.b) + rho), "<",
             delta_v * ((1 - lv.b) / (1 - lv.a * lv.b) - lv.b * rho))
        _add(ledger, "shifted-equilibrium inequality 2",
             lv.a * delta_v * (1 - lv.a) / (1 - lv.a * lv.b), "<",
             delta_u * ((1 - lv.a) / (1 - lv.a * lv.b) - 2 * rho))
        values.update(eta1=eta1, delta_u=delta_u, delta_v=delta_v, delta4=delta4)
    else:
        theta = 0.5
        z2 = -(xi2 + delta2)
        V_at = float(base.eval(xi2 + delta2, component=1))
        U_at = float(base.eval(xi2 + delta2, component=0))

        def cond(eta1):
            dv = eta1 * np.exp(-lam2 * xi_star)
            eta2 = dv / (z2**theta * V_at)
            ru_junction = eps4 * np.sin(delta3 * delta2)
            return (dv <= 0.02 * ru_min and dv <= vcap
                    and ru_junction > eta2 * z2**theta * (1.0 - U_at)
                    and ru_junction > 10.0 * dv)

        eta1 = _amplitude_ladder(1e-3, cond)
        delta_v = eta1 * np.exp(-lam2 * xi_star)
        eta2 = delta_v / (z2**theta * V_at)
        delta4, Fres = claim36_delta4(base, xi2=xi2, delta2=delta2,
                                      delta3=delta3, eps4=eps4, eta2=eta2,
                                      theta=theta)
        eps5 = eps4 * np.sin(delta3 * delta4) / (
            (-xi2 + delta4)**theta * (1.0 - float(base.eval(xi2 - delta4))))
        _add(ledger, "eps5 equals eta2 (junction identity)",
             abs(eps5 - eta2), "<=", 1e-8 * eta2)
        M1 = eta2 ** (-1.0 / theta)
        delta_u = eps4 * np.sin(delta3 * delta4)
        # weighted gap positivity on (-M1, xi2-delta4]
        start = _trusted_left_start(base)
        zz = np.linspace(xi2 - delta4, max(-M1 + 1e-9, base.grid.lo), 500)
        gap = 1.0 - eta2 * np.power(-zz, theta)
        _add(ledger, "1 - eta2 (-xi)^theta > 0 left of the sine band",
             0.0, "<", float(np.min(gap)))
        # the weighted approach-to-1 must be increasing toward the interface
        # (checked on the trusted interior; the clamped boundary zone forces
        # 1-U* to zero artificially)
        zz2 = xi[(xi <= xi2 + delta2) & (xi >= max(-M1, start))]
        wgt = np.power(-zz2, theta) * (1.0 - base.eval(zz2, component=0))
        _add(ledger, "weighted (1-U*) increasing on the degenerate band",
             float(np.min(np.diff(wgt))), ">=", -1e-12)
        values.update(eta1=eta1, eta2=eta2, eps5=eps5, theta=theta,
                      delta4=delta4, delta_u=delta_u, delta_v=delta_v,
                      M1=M1, claim_F_residual=Fres)

    params = CertificateParams(recipe=recipe, family="lv", c=c, delta0=delta0,
                               c_eff=c_eff, values=values, ledger=ledger,
                               tail=tail)
    params.check_ledger()
    return params


def claim36_delta4(base: WaveProfile, xi2: float, delta2: float, delta3: float,
                   eps4: float, eta2: float, theta: float):
    """Unique junction offset in (0, delta2) where the sine modifier meets the
    weighted approach-to-1 curve; verifies the strict sandwich on the band."""

    def F(x):
        return (eps4 * np.sin(delta3 * (x - xi2))
                + eta2 * np.power(-x, theta) * (1.0 - base.eval(x, component=0)))

    F_hi = float(F(xi2))
    F_lo = float(F(xi2 - delta2))
    if not (F_hi > 0.0 and F_lo < 0.0):
        raise SignConditionFailed(
            f"junction-selection endpoints have wrong signs: F(xi2)={F_hi:.3e}, "
            f"F(xi2-delta2)={F_lo:.3e}; reduce the v-amplitude")
    root = brentq(F, xi2 - delta2, xi2, xtol=1e-14)
    delta4 = xi2 - root
    res = abs(float(F(root)))
    if res > 1e-10:
        raise SignConditionFailed(f"junction root residual {res:.2e} too large")
    # strict sandwich -eta2 (-xi)^theta (1-U*) < R_u < 0 on (xi2-delta4, xi2)
    xs = np.linspace(xi2 - delta4, xi2, 1002)[1:-1]
    Ru = eps4 * np.sin(delta3 * (xs - xi2))
    lower = -eta2 * np.power(-xs, theta) * (1.0 - base.eval(xs, component=0))
    if not (np.all(Ru < 0.0) and np.all(Ru > lower)):
        raise SignConditionFailed("sandwich violated on the junction band")
    return float(delta4), res


def solve_params(spec: ModelSpec, base: WaveProfile, delta0: float,
                 recipe: Optional[str] = None,
                 tail: Optional[tails.TailFit] = None) -> CertificateParams:
    """Resolve a certificate parameter set for the requested recipe.

    recipe defaults to the one matching the model family (scalar recipes for
    the scalar families, the b-regime recipe for competition).
    """
    if delta0 <= 0:
        raise LedgerInfeasible("speed decrement must be positive")
    if spec.family in ("local", "nonlocal"):
        if recipe not in (None, "scalar", "scalar-local-analog"):
            raise LedgerInfeasible(f"recipe {recipe!r} needs a competition model")
        return solve_params_scalar(spec, base, delta0, tail=tail)
    if recipe is not None and not recipe.startswith("lv"):
        raise LedgerInfeasible(f"recipe {recipe!r} needs a scalar model")
    return solve_params_lv(spec, base, delta0, tail=tail)
