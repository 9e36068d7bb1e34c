"""Assembly of certificate profiles from resolved parameter sets."""

import numpy as np
from scipy.optimize import brentq

from ..errors import DiscontinuityDetected
from ..models import ModelSpec
from ..waves import SemiWave, WaveProfile
from .params import CertificateParams
from .pieces import (
    BaseFunction,
    Const,
    Descriptor,
    Exp,
    LinExp,
    Piece,
    PiecewiseProfile,
    Pow,
    Sin,
    ZERO,
)

NEG_INF = -np.inf
POS_INF = np.inf


def _base_fn(base: WaveProfile, component: int) -> BaseFunction:
    return BaseFunction(spline=base.splines()[component],
                        lo=base.grid.lo, hi=base.grid.hi,
                        left_value=float(base.left_target[component]),
                        right_value=float(base.right_target[component]))


def _d(*terms):
    return Descriptor(tuple(terms))


def _crossing_on_grid(xi, gap, lo_ok):
    """Rightmost grid bracket where `gap` changes sign (clamp junction)."""
    sign = np.sign(gap)
    idx = np.where((np.diff(sign) != 0) & lo_ok[:-1])[0]
    return idx[-1] if len(idx) else None


def build_scalar_supersolution(spec: ModelSpec, base: WaveProfile,
                               params: CertificateParams) -> PiecewiseProfile:
    v = params.values
    xi1, xi2 = v["xi1"], v["xi2"]
    d1, d2 = v["delta1"], v["delta2"]
    pieces = []
    if v["M1"] is not None:
        pieces.append(Piece(NEG_INF, v["M1"], _d(Const(1.0)), ZERO, "clamped at 1"))
        lo_mid = v["M1"]
    else:
        lo_mid = NEG_INF
    pieces += [
        Piece(lo_mid, xi2 - d2, _d(Exp(v["eps4"], v["lam2"])), _d(Const(1.0)),
              "left exponential lift"),
        Piece(xi2 - d2, xi2 + d1, _d(Sin(-v["eps3"], v["delta3"], xi2)),
              _d(Const(1.0)), "sine bridge"),
        Piece(xi2 + d1, xi1, _d(Exp(-v["eps2"], v["lam1"])), _d(Const(1.0)),
              "interface depression"),
        Piece(xi1, POS_INF, _d(Exp(v["eps1"], -v["lam_star"])), ZERO,
              "fast-decay far field"),
    ]
    prof = PiecewiseProfile(pieces=pieces, base=_base_fn(base, 0), kind="super",
                            clamp_rule="min with 1", label="scalar super-solution",
                            base_speed=base.c, base_residual=base.residual,
                            knot_spacing=base.grid.h)
    prof.check_continuity()
    _check_bounds(prof, base, lo=0.0, hi=1.0 + 1e-12)
    return prof


def _check_bounds(prof, base, lo, hi):
    xs = np.linspace(base.grid.lo, base.grid.hi, 4001)
    vals = prof.value(xs)
    if np.min(vals) < lo - 1e-12 or np.max(vals) > hi + 1e-12:
        raise DiscontinuityDetected(
            f"built profile {prof.label!r} leaves [{lo}, {hi}]: "
            f"range [{vals.min():.3e}, {vals.max():.3e}]")


def build_lv_supersolution(spec: ModelSpec, base: WaveProfile,
                           params: CertificateParams):
    lv = spec.lv
    v = params.values
    xi_star, xi1, xi2 = v["xi_star"], v["xi1"], v["xi2"]
    d1, d2, d3, d4 = v["delta1"], v["delta2"], v["delta3"], v["delta4"]
    xi = base.grid.xi

    # u component
    u_pieces = []
    if params.recipe == "lv_beq1":
        M1 = v["M1"]
        beta_mid = _d(Const(1.0), Pow(-v["eps5"], v["theta"]))
        u_pieces.append(Piece(NEG_INF, -M1, _d(Const(1.0)), ZERO, "clamped at 1"))
        u_pieces.append(Piece(-M1, xi2 - d4, _d(Pow(v["eps5"], v["theta"])),
                              beta_mid, "weighted approach"))
    else:
        gap = (1.0 - base.U) - v["delta_u"]
        k = _crossing_on_grid(xi, gap, xi < xi2 - d4)
        if k is not None:
            Mu = brentq(lambda x: (1.0 - base.eval(x)) - v["delta_u"],
                        xi[k], xi[k + 1], xtol=1e-14)
            u_pieces.append(Piece(NEG_INF, Mu, _d(Const(1.0)), ZERO, "clamped at 1"))
            lo_mid = Mu
        else:
            lo_mid = NEG_INF
        u_pieces.append(Piece(lo_mid, xi2 - d4, _d(Const(v["delta_u"])),
                              _d(Const(1.0)), "constant lift"))
    u_pieces += [
        Piece(xi2 - d4, xi2 + d2, _d(Sin(-v["eps4"], d3, xi2)), _d(Const(1.0)),
              "sine bridge"),
        Piece(xi2 + d2, xi1 + d1, _d(Exp(-v["eps3"], v["lam4"])), _d(Const(1.0)),
              "growing-exponential depression"),
        Piece(xi1 + d1, xi_star, _d(LinExp(-v["eps2"], -v["lam3"], xi1)),
              _d(Const(1.0)), "linear-exponential depression"),
        Piece(xi_star, POS_INF, _d(Exp(v["eps1"], -v["lam1"])), ZERO,
              "fast-decay far field"),
    ]
    prof_u = PiecewiseProfile(pieces=u_pieces, base=_base_fn(base, 0),
                              kind="super", clamp_rule="min with 1",
                              label="u super-component", base_speed=base.c,
                              base_residual=base.residual,
                              knot_spacing=base.grid.h)

    # v component
    v_pieces = []
    if params.recipe == "lv_beq1":
        M1 = v["M1"]
        v_pieces.append(Piece(NEG_INF, -M1, _d(Const(0.0)), ZERO, "clamped at 0"))
        v_pieces.append(Piece(-M1, xi2 + d2, ZERO,
                              _d(Const(1.0), Pow(-v["eta2"], v["theta"])),
                              "weighted deficit"))
        v_lo = xi2 + d2
    elif lv.b > 1.0:
        gap = base.V - v["delta_v"]
        k = _crossing_on_grid(xi, gap, xi < xi_star)
        if k is not None:
            Mv = brentq(lambda x: base.eval(x, component=1) - v["delta_v"],
                        xi[k], xi[k + 1], xtol=1e-14)
            v_pieces.append(Piece(NEG_INF, Mv, _d(Const(0.0)), ZERO, "clamped at 0"))
            v_lo = Mv
        else:
            v_lo = NEG_INF
    else:
        v_lo = NEG_INF
    v_pieces += [
        Piece(v_lo, xi_star, _d(Const(-v["delta_v"])), _d(Const(1.0)),
              "constant deficit"),
        Piece(xi_star, POS_INF, _d(Exp(-v["eta1"], -v["lam2"])), _d(Const(1.0)),
              "exponential deficit"),
    ]
    prof_v = PiecewiseProfile(pieces=v_pieces, base=_base_fn(base, 1),
                              kind="sub", clamp_rule="max with 0",
                              label="v super-component", base_speed=base.c,
                              base_residual=base.residual,
                              knot_spacing=base.grid.h)
    prof_u.check_continuity()
    prof_v.check_continuity()
    _check_bounds(prof_u, base, lo=0.0, hi=1.0 + 1e-12)
    _check_bounds(prof_v, base, lo=-1e-12, hi=1.0)
    return prof_u, prof_v


def build_supersolution(spec: ModelSpec, base: WaveProfile,
                        params: CertificateParams):
    """Continuous piecewise super-solution profile(s) from a resolved
    parameter set (scalar: one profile; competition: a (U1, V1) pair)."""
    if params.recipe == "scalar":
        return build_scalar_supersolution(spec, base, params)
    return build_lv_supersolution(spec, base, params)


def build_subsolution(semi: SemiWave, xi1: float) -> PiecewiseProfile:
    """Sub-solution: the semi-wave shifted to cut at xi1, zero to the right."""
    base = BaseFunction(spline=semi.spline(), lo=semi.grid.lo, hi=0.0,
                        left_value=1.0, right_value=0.0, shift=xi1)
    pieces = [
        Piece(NEG_INF, xi1, ZERO, _d(Const(1.0)), "shifted semi-wave"),
        Piece(xi1, POS_INF, _d(Const(0.0)), ZERO, "zero tail"),
    ]
    prof = PiecewiseProfile(pieces=pieces, base=base, kind="sub",
                            clamp_rule="", label="semi-wave sub-solution",
                            base_speed=semi.c, base_residual=semi.residual,
                            knot_spacing=semi.grid.h,
                            meta={"semiwave": semi, "xi1": xi1})
    prof.check_continuity()
    return prof
