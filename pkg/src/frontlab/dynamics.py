"""Cauchy-problem simulation for the three families, front-position
tracking, spreading-speed measurement, and ordered-initial-data comparison
experiments.

Schemes: Crank-Nicolson in the diffusion, explicit reaction (local and
competition families); fully explicit for the nonlocal dispersal operator
(bounded, no stiffness).  Under the validated step bounds every stepper is
monotone, so the discrete comparison principle holds exactly and solutions
stay in the invariant region.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_banded

from . import kernels
from .errors import (
    BlowUp,
    ConfigError,
    InsufficientData,
    NoCrossing,
)
from .models import ModelSpec

OVERSHOOT_TOL = 1e-6
BLOWUP_TOL = 1e-3
GROW_MARGIN = 50.0  # nodes are added once activity comes this close to an edge


@dataclass(frozen=True)
class SimConfig:
    lo: float
    hi: float
    dx: float
    dt: float
    t_final: float
    snapshot_dt: float = 1.0
    theta_front: float = 0.5
    grow: bool = True
    enforce_cfl: bool = True  # escape hatch for instability stress tests

    def __post_init__(self):
        if min(self.dx, self.dt, self.t_final, self.snapshot_dt) <= 0:
            raise ConfigError("dx, dt, t_final, snapshot_dt must be positive")
        if not 0.0 < self.theta_front < 1.0:
            raise ConfigError("front-tracking level must lie in (0, 1)")
        if self.hi <= self.lo:
            raise ConfigError("domain requires hi > lo")


def cfl_bound(spec: ModelSpec, cfg: SimConfig) -> float:
    """Largest step keeping the scheme monotone for this family.

    local: dt <= dx^2 (Crank-Nicolson positivity) and dt*sup|f'| <= 1;
    nonlocal: dt*(1 + sup|f'|) <= 1 and dt <= 0.2;
    competition: dt <= dx^2/max(1, d) and dt*r*(2+b) <= 1, dt*(2+a) <= 1.
    """
    if spec.family == "lv":
        lv = spec.lv
        return min(cfg.dx**2 / max(1.0, lv.d),
                   1.0 / (lv.r * (2.0 + lv.b)),
                   1.0 / (2.0 + lv.a))
    k1 = spec.nonlinearity.sup_abs_fp(-0.05, 1.05)
    if spec.family == "local":
        return min(cfg.dx**2, 1.0 / k1)
    return min(0.2, 1.0 / (1.0 + k1))


@dataclass
class SimResult:
    times: np.ndarray
    fronts: np.ndarray
    speed: Optional[float]
    speed_stderr: Optional[float]
    final_x: np.ndarray
    final_state: np.ndarray
    overshoot: float
    config: SimConfig


def front_position(x, state, level, component=0):
    """Rightmost downward crossing of `level`, linearly interpolated."""
    w = state[component] if np.asarray(state).ndim == 2 else np.asarray(state)
    s = w - level
    idx = np.where((s[:-1] > 0) & (s[1:] <= 0))[0]
    if len(idx) == 0:
        raise NoCrossing(f"state never crosses level {level}")
    i = idx[-1]
    return float(x[i] + (x[i + 1] - x[i]) * s[i] / (s[i] - s[i + 1]))


def spreading_speed(result: SimResult, window: float = 0.4):
    """Least-squares slope of the front path over the trailing time window."""
    t, xf = result.times, result.fronts
    ok = np.isfinite(xf)
    t, xf = t[ok], xf[ok]
    if len(t) < 2:
        raise InsufficientData("no front positions recorded")
    t0 = t[-1] - window * (t[-1] - t[0])
    sel = t >= t0
    if np.sum(sel) < 10:
        raise InsufficientData(f"only {int(np.sum(sel))} snapshots in window")
    ts, xs = t[sel], xf[sel]
    A = np.stack([ts, np.ones_like(ts)], axis=1)
    coef, res2, _, _ = np.linalg.lstsq(A, xs, rcond=None)
    slope = float(coef[0])
    dof = len(ts) - 2
    if dof > 0 and len(res2):
        sigma2 = float(res2[0]) / dof
        stderr = float(np.sqrt(sigma2 / np.sum((ts - ts.mean()) ** 2)))
    else:
        stderr = 0.0
    return slope, stderr


# ---------------------------------------------------------------------------
# initial-data helpers


def bump(center=0.0, width=10.0, height=1.0):
    """Compactly supported indicator bump."""

    def w0(x):
        return np.where(np.abs(x - center) <= width, height, 0.0)

    return w0


def lv_invasion(width=10.0, height=1.0):
    """Invader bump against the resident state: u compact, v identically 1."""

    def init(x):
        u0 = np.where(np.abs(x) <= width, height, 0.0)
        return np.stack([u0, np.ones_like(x)])

    return init


def from_profile(profile, shift=0.0):
    """Initial data from a traveling-wave profile translated by `shift`."""
    ncomp = profile.components().shape[0]

    def init(x):
        vals = [profile.eval(x - shift, component=k) for k in range(ncomp)]
        return vals[0] if ncomp == 1 else np.stack(vals)

    return init


# ---------------------------------------------------------------------------


def _generic_scalar_local(w, r, dt, nsteps, fcall, left, right):
    n = len(w)
    mu = 0.5 * r
    dl = np.full(n, -mu)
    dd = np.full(n, 1.0 + 2.0 * mu)
    du = np.full(n, -mu)
    dl[0] = du[0] = dl[-1] = du[-1] = 0.0
    dd[0] = dd[-1] = 1.0
    ab = np.zeros((3, n))
    ab[0, 1:] = du[:-1]
    ab[1] = dd
    ab[2, :-1] = dl[1:]
    for _ in range(nsteps):
        rhs = w + dt * fcall(w)
        rhs[1:-1] += mu * (w[:-2] - 2.0 * w[1:-1] + w[2:])
        rhs[0], rhs[-1] = left, right
        w = solve_banded((1, 1), ab, rhs)
    return w


def _generic_scalar_nonlocal(w, kappa, dt, nsteps, fcall, left, right):
    for _ in range(nsteps):
        conv = kernels.conv_clamped(w, kappa, left, right)
        w = w + dt * (conv - w + fcall(w))
        w[0], w[-1] = left, right
    return w


def _make_stepper(spec, cfg, dt):
    """Returns step(state, nsteps, rest_left, rest_right) for the family."""
    if spec.family == "lv":
        lv = spec.lv
        r = dt / cfg.dx**2

        def step(state, nsteps, rl, rr):
            u, v = kernels.step_lv(state[0], state[1], lv.d, lv.r, lv.a, lv.b,
                                   r, dt, nsteps, rl[0], rl[1], rr[0], rr[1])
            return np.stack([u, v])

        return step
    f = spec.nonlinearity
    coefs = f.poly_coefs
    if spec.family == "local":
        r = dt / cfg.dx**2
        if coefs is not None:
            return lambda w, n, rl, rr: kernels.step_scalar_local(
                w, r, dt, n, coefs, rl, rr)
        return lambda w, n, rl, rr: _generic_scalar_local(
            w, r, dt, n, f.f, rl, rr)
    kappa = spec.kernel.grid_weights(cfg.dx)
    if coefs is not None:
        return lambda w, n, rl, rr: kernels.step_scalar_nonlocal(
            w, kappa, dt, n, coefs, rl, rr)
    return lambda w, n, rl, rr: _generic_scalar_nonlocal(
        w, kappa, dt, n, f.f, rl, rr)


def _activity_bounds(x, state, rest_left, rest_right, tol=1e-8):
    dev_left = np.max(np.abs(state - rest_left[:, None]), axis=0)
    dev_right = np.max(np.abs(state - rest_right[:, None]), axis=0)
    active = np.where((dev_left > tol) & (dev_right > tol))[0]
    if len(active) == 0:
        return x[0], x[0]
    return x[active[0]], x[active[-1]]


def simulate(spec: ModelSpec, init: Callable, cfg: SimConfig) -> SimResult:
    """Run the Cauchy problem; the solution must stay in the invariant region.

    `init` maps node positions to initial values (shape (n,) scalar families,
    (2, n) competition).  Boundary values are clamped to the initial boundary
    states; with cfg.grow the domain is extended in chunks so boundaries stay
    GROW_MARGIN ahead of any activity.
    """
    dt_max = cfl_bound(spec, cfg)
    if cfg.enforce_cfl and cfg.dt > dt_max * (1 + 1e-12):
        raise ConfigError(
            f"dt={cfg.dt} violates the monotone step bound {dt_max:.6g} "
            f"for family {spec.family!r}")
    n = int(round((cfg.hi - cfg.lo) / cfg.dx)) + 1
    x = cfg.lo + cfg.dx * np.arange(n)
    state = np.atleast_2d(np.asarray(init(x), dtype=float))
    ncomp = 2 if spec.family == "lv" else 1
    if state.shape != (ncomp, n):
        raise ConfigError(f"initial data shape {state.shape} != ({ncomp}, {n})")
    if np.min(state) < -OVERSHOOT_TOL or np.max(state) > 1.0 + OVERSHOOT_TOL:
        raise ConfigError("initial data must lie in the invariant region")
    rest_left = state[:, 0].copy()
    rest_right = state[:, -1].copy()

    n_sub = max(1, int(round(cfg.snapshot_dt / cfg.dt)))
    dt = cfg.snapshot_dt / n_sub
    stepper = _make_stepper(spec, cfg, dt)
    level = cfg.theta_front * (spec.lv.u_star if spec.family == "lv" else 1.0)

    n_snap = int(round(cfg.t_final / cfg.snapshot_dt))
    times = np.zeros(n_snap + 1)
    fronts = np.full(n_snap + 1, np.nan)
    overshoot = 0.0

    def track(i, t):
        times[i] = t
        try:
            fronts[i] = front_position(x, state, level)
        except NoCrossing:
            fronts[i] = np.nan

    track(0, 0.0)
    chunk = max(16, int(round(64.0 / cfg.dx)))
    for i in range(1, n_snap + 1):
        if spec.family == "lv":
            state = stepper(state, n_sub, rest_left, rest_right)
        else:
            state = stepper(state[0], n_sub, rest_left[0], rest_right[0])[None, :]
        lo_val = float(np.min(state))
        hi_val = float(np.max(state))
        overshoot = max(overshoot, -lo_val, hi_val - 1.0)
        if lo_val < -BLOWUP_TOL or hi_val > 1.0 + BLOWUP_TOL:
            raise BlowUp(
                f"state left the invariant region at t={i * cfg.snapshot_dt:.3g} "
                f"(min={lo_val:.3g}, max={hi_val:.3g}); the step size is unstable")
        if cfg.grow:
            act_lo, act_hi = _activity_bounds(x, state, rest_left, rest_right)
            if act_hi > x[-1] - GROW_MARGIN:
                ext = x[-1] + cfg.dx * np.arange(1, chunk + 1)
                x = np.concatenate([x, ext])
                state = np.concatenate(
                    [state, np.repeat(rest_right[:, None], chunk, axis=1)], axis=1)
            if act_lo < x[0] + GROW_MARGIN:
                ext = x[0] - cfg.dx * np.arange(chunk, 0, -1)
                x = np.concatenate([ext, x])
                state = np.concatenate(
                    [np.repeat(rest_left[:, None], chunk, axis=1), state], axis=1)
        track(i, i * cfg.snapshot_dt)

    final_state = state if spec.family == "lv" else state[0]
    result = SimResult(times=times, fronts=fronts, speed=None, speed_stderr=None,
                       final_x=x, final_state=final_state, overshoot=overshoot,
                       config=cfg)
    try:
        result.speed, result.speed_stderr = spreading_speed(result)
    except InsufficientData:
        pass
    return result


@dataclass
class OrderingReport:
    """Outcome of an ordered-initial-data comparison run."""

    min_diff: float
    min_diff_by_component: tuple
    violated: bool
    speed_upper: Optional[float]
    speed_lower: Optional[float]
    n_snapshots: int


ORDER_VIOLATION_TOL = 1e-6


def comparison_experiment(spec: ModelSpec, init_upper: Callable,
                          init_lower: Callable, cfg: SimConfig) -> OrderingReport:
    """Evolve an ordered pair and report the worst ordered difference.

    Competition order: u larger and v smaller counts as 'upper'.  The domain
    is held fixed (growth off) so states stay node-aligned.
    """
    cfg = replace(cfg, grow=False)
    n = int(round((cfg.hi - cfg.lo) / cfg.dx)) + 1
    x = cfg.lo + cfg.dx * np.arange(n)
    up0 = np.atleast_2d(np.asarray(init_upper(x), dtype=float))
    lo0 = np.atleast_2d(np.asarray(init_lower(x), dtype=float))
    if spec.family == "lv":
        d0 = min(float(np.min(up0[0] - lo0[0])), float(np.min(lo0[1] - up0[1])))
    else:
        d0 = float(np.min(up0 - lo0))
    if d0 < -ORDER_VIOLATION_TOL:
        raise ConfigError(f"initial data are not ordered (min diff {d0:.3e})")

    dt_max = cfl_bound(spec, cfg)
    if cfg.enforce_cfl and cfg.dt > dt_max * (1 + 1e-12):
        raise ConfigError(f"dt={cfg.dt} violates the monotone step bound {dt_max:.6g}")
    n_sub = max(1, int(round(cfg.snapshot_dt / cfg.dt)))
    dt = cfg.snapshot_dt / n_sub
    stepper = _make_stepper(spec, cfg, dt)
    level = cfg.theta_front * (spec.lv.u_star if spec.family == "lv" else 1.0)

    su, sl = up0, lo0
    ru_l, ru_r = up0[:, 0].copy(), up0[:, -1].copy()
    rl_l, rl_r = lo0[:, 0].copy(), lo0[:, -1].copy()
    n_snap = int(round(cfg.t_final / cfg.snapshot_dt))
    mins = [np.inf, np.inf]
    times = np.zeros(n_snap + 1)
    f_up = np.full(n_snap + 1, np.nan)
    f_lo = np.full(n_snap + 1, np.nan)

    def record(i):
        if spec.family == "lv":
            mins[0] = min(mins[0], float(np.min(su[0] - sl[0])))
            mins[1] = min(mins[1], float(np.min(sl[1] - su[1])))
        else:
            mins[0] = min(mins[0], float(np.min(su - sl)))
        for fr, st in ((f_up, su), (f_lo, sl)):
            try:
                fr[i] = front_position(x, st, level)
            except NoCrossing:
                pass

    record(0)
    for i in range(1, n_snap + 1):
        if spec.family == "lv":
            su = stepper(su, n_sub, ru_l, ru_r)
            sl = stepper(sl, n_sub, rl_l, rl_r)
        else:
            su = stepper(su[0], n_sub, ru_l[0], ru_r[0])[None, :]
            sl = stepper(sl[0], n_sub, rl_l[0], rl_r[0])[None, :]
        times[i] = i * cfg.snapshot_dt
        record(i)

    by_comp = (mins[0],) if spec.family != "lv" else (mins[0], mins[1])
    worst = min(m for m in by_comp)

    def fit(fr):
        r = SimResult(times=times, fronts=fr, speed=None, speed_stderr=None,
                      final_x=x, final_state=su, overshoot=0.0, config=cfg)
        try:
            return spreading_speed(r)[0]
        except InsufficientData:
            return None

    return OrderingReport(min_diff=worst, min_diff_by_component=by_comp,
                          violated=worst < -ORDER_VIOLATION_TOL,
                          speed_upper=fit(f_up), speed_lower=fit(f_lo),
                          n_snapshots=n_snap + 1)
