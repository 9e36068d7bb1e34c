"""Tail-decay fitting and front classification.

Fits A*|xi|^p*exp(-rate*|xi|) laws on trusted tail windows of wave profiles
and matches the fitted rate against the characteristic roots: minimal-speed
fronts at the linear speed decay at the double root (possibly with a linear
prefactor), minimal fronts above it decay at the fast root, and every
noncritical front decays at the slow root.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import spectral
from .errors import WindowTooNoisy
from .models import ModelSpec
from .waves import WaveProfile

TRUSTED_EDGE_NODES = 10    # dropped next to the truncation boundary
DEV_CEIL = 1e-2            # tail window starts once the deviation is below this
DEV_CEIL_POWER = 0.2       # power-law tails decay too slowly for the exp ceiling
DEV_FLOOR = 1e-6           # below this, slow-mode crossover and discretization
                           # noise pollute the window
P_SELECT_IMPROVEMENT = 0.05
RATE_MATCH_TOL = 0.05
LOG_RESIDUAL_THRESHOLD = 0.25


@dataclass
class TailFit:
    side: str                   # '+' or '-'
    component: int
    rate: float                 # decay rate per unit length (0 for power laws)
    p: int                      # polynomial order; -1 marks a pure power law
    amplitude: float
    amplitude_b: Optional[float]   # secondary amplitude for p = 1 fits
    residual: float             # rms misfit of log(deviation)
    window: tuple
    n_points: int


@dataclass
class Classification:
    verdict: str                # Pulled | Pushed | Noncritical | Inconsistent
    expected_rate: float
    fitted_rate: float
    margin: float               # relative distance of the fit to the match
    p_fitted: int
    p_allowed: tuple
    detail: str = ""


def _deviation(profile, side, component):
    xi = profile.grid.xi
    vals = profile.components()[component]
    if side == "+":
        limit = profile.right_target[component]
    else:
        limit = profile.left_target[component]
    return xi, np.abs(vals - limit)


def _auto_window(xi, dev, side, floor, ceil):
    n = len(xi)
    keep = np.zeros(n, dtype=bool)
    keep[TRUSTED_EDGE_NODES:n - TRUSTED_EDGE_NODES] = True
    keep &= (dev > floor) & (dev < ceil)
    keep &= (xi > 0.5) if side == "+" else (xi < -0.5)
    return keep


def fit_tail(profile: WaveProfile, side: str = "+", component: int = 0,
             window: Optional[tuple] = None, allow_p2: bool = False,
             model: str = "exp", dev_floor: Optional[float] = None) -> TailFit:
    """Least-squares fit of log(deviation) on a trusted tail window.

    `model='exp'` fits A|xi|^p e^{-rate |xi|} selecting p in {0, 1} (2 only
    when allowed) with a 5% residual-improvement threshold; `model='power'`
    fits a pure power law C|xi|^p (degenerate competition left tails).
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    xi, dev = _deviation(profile, side, component)
    if dev_floor is None:
        dev_floor = max(DEV_FLOOR, 30.0 * profile.residual)
    if window is not None:
        keep = (xi >= window[0]) & (xi <= window[1]) & (dev > 0)
    else:
        ceil = DEV_CEIL_POWER if model == "power" else DEV_CEIL
        keep = _auto_window(xi, dev, side, dev_floor, ceil)
    z = np.abs(xi[keep])
    d = dev[keep]
    if len(z) < 30:
        raise WindowTooNoisy(
            f"only {len(z)} usable nodes in the tail window (need 30)")
    y = np.log(d)
    lz = np.log(z)

    if model == "power":
        A = np.stack([np.ones_like(z), lz], axis=1)
        coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
        resid = float(np.sqrt(np.mean((y - A @ coef) ** 2)))
        return TailFit(side=side, component=component, rate=0.0,
                       p=int(round(coef[1])), amplitude=float(np.exp(coef[0])),
                       amplitude_b=None, residual=resid,
                       window=(float(xi[keep].min()), float(xi[keep].max())),
                       n_points=len(z))

    ps = (0, 1, 2) if allow_p2 else (0, 1)
    fits = {}
    for p in ps:
        A = np.stack([np.ones_like(z), -z], axis=1)
        coef, _, _, _ = np.linalg.lstsq(A, y - p * lz, rcond=None)
        resid = float(np.sqrt(np.mean((y - p * lz - A @ coef) ** 2)))
        fits[p] = (coef, resid)
    p_best = ps[0]
    for p in ps[1:]:
        if fits[p][1] < (1.0 - P_SELECT_IMPROVEMENT) * fits[p_best][1]:
            p_best = p
    coef, resid = fits[p_best]
    if resid > LOG_RESIDUAL_THRESHOLD:
        raise WindowTooNoisy(
            f"tail fit residual {resid:.3g} above threshold; profile not "
            "converged enough on the window")
    rate = float(coef[1])
    amp = float(np.exp(coef[0]))
    amp_b = None
    if p_best == 1:
        # split (A*z + B) e^{-rate z} by linear least squares at fixed rate
        basis = np.stack([z, np.ones_like(z)], axis=1) * np.exp(-rate * z)[:, None]
        ab_coef, _, _, _ = np.linalg.lstsq(basis, d, rcond=None)
        amp, amp_b = float(ab_coef[0]), float(ab_coef[1])
    return TailFit(side=side, component=component, rate=rate, p=p_best,
                   amplitude=amp, amplitude_b=amp_b, residual=resid,
                   window=(float(xi[keep].min()), float(xi[keep].max())),
                   n_points=len(z))


def classify(spec: ModelSpec, c: float, c_star: float, roots: spectral.RootSet,
             fit: TailFit, rate_tol: float = RATE_MATCH_TOL,
             linear_tol: float = 0.01) -> Classification:
    """Classify a front by matching its fitted decay rate to the expected
    characteristic root (decision table in the module docstring)."""
    c_lin = roots.linear_speed
    at_minimal = c <= c_star * (1.0 + max(1e-8, 0.25 * rate_tol))
    linear_selected = c_star <= c_lin * (1.0 + linear_tol)
    if at_minimal and linear_selected:
        verdict, expected, p_allowed = "Pulled", roots.lambda0, (0, 1)
    elif at_minimal:
        verdict, expected, p_allowed = "Pushed", roots.lambda_plus, (0,)
    else:
        verdict, expected, p_allowed = "Noncritical", roots.lambda_minus, (0,)
    margin = abs(fit.rate - expected) / expected
    detail = (f"c={c:.6g}, c*={c_star:.6g}, linear={c_lin:.6g}; "
              f"fitted rate {fit.rate:.6g} vs {expected:.6g}")
    if margin > rate_tol:
        return Classification(verdict="Inconsistent", expected_rate=expected,
                              fitted_rate=fit.rate, margin=margin,
                              p_fitted=fit.p, p_allowed=p_allowed,
                              detail=detail + f" (expected {verdict})")
    return Classification(verdict=verdict, expected_rate=expected,
                          fitted_rate=fit.rate, margin=margin,
                          p_fitted=fit.p, p_allowed=p_allowed, detail=detail)


@dataclass
class LVLeftReport:
    """Left-tail behavior of a competition wave, by regime."""

    regime: str                  # 'b>1' | 'b<1' | 'b=1'
    fits: list
    expected: dict
    ratio_raw: Optional[float] = None           # (1-U)/V at the deep window
    ratio_extrapolated: Optional[float] = None  # Richardson limit estimate
    corollary_values: Optional[np.ndarray] = None  # |xi (1-U-aV)| samples
    corollary_decreasing: Optional[bool] = None


def _window_means(z, g, lo_frac, hi_frac):
    z_lo = lo_frac * z.max()
    z_hi = hi_frac * z.max()
    sel = (z >= z_lo) & (z <= z_hi)
    return float(np.mean(z[sel])), float(np.mean(g[sel]))


def left_tail_report(profile: WaveProfile, lv, c: float) -> LVLeftReport:
    """Fit the left-tail laws of a competition wave against the regime's
    expected exponents (or the degenerate power law at b = 1)."""
    left = spectral.lv_left_roots(lv, c)
    xi = profile.grid.xi
    U, V = profile.U, profile.V
    if lv.b > 1.0:
        fit_v = fit_tail(profile, side="-", component=1)
        fit_u = fit_tail(profile, side="-", component=0)
        mu_min = min(left.mu_u_plus, left.mu_v_plus)
        return LVLeftReport(
            regime="b>1", fits=[fit_u, fit_v],
            expected={"V": left.mu_v_plus, "1-U": mu_min,
                      "mu_u_plus": left.mu_u_plus, "mu_v_plus": left.mu_v_plus})
    if lv.b < 1.0:
        fit_u = fit_tail(profile, side="-", component=0)
        fit_v = fit_tail(profile, side="-", component=1)
        return LVLeftReport(regime="b<1", fits=[fit_u, fit_v],
                            expected={"u*-U": left.nu, "V-v*": left.nu,
                                      "nu": left.nu})
    # degenerate regime: V ~ l/|xi|, (1-U)/V -> a, xi*(1-U-aV) -> 0
    fit_v = fit_tail(profile, side="-", component=1, model="power")
    mask = xi < -0.25 * abs(profile.grid.lo)
    mask[:TRUSTED_EDGE_NODES] = False
    z = -xi[mask]
    ratio = (1.0 - U[mask]) / np.maximum(V[mask], 1e-300)
    z1, g1 = _window_means(z, ratio, 0.55, 0.85)
    z2, g2 = _window_means(z, ratio, 0.30, 0.55)
    extrapolated = (g1 * z1 - g2 * z2) / (z1 - z2)
    raw = g1
    combo = np.abs(xi[mask] * (1.0 - U[mask] - lv.a * V[mask]))
    idx = np.argsort(z)
    samples = combo[idx][:: max(1, len(z) // 12)]
    decreasing = bool(samples[-1] < samples[0]) and samples[-1] < 0.5 * samples[0]
    return LVLeftReport(regime="b=1", fits=[fit_v],
                        expected={"V_power": -1, "ratio_limit": lv.a},
                        ratio_raw=raw, ratio_extrapolated=extrapolated,
                        corollary_values=samples,
                        corollary_decreasing=decreasing)
