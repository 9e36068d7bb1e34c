"""Traveling-wave boundary-value solvers for the three families, minimal
speeds by bisection on an existence predicate, and the half-line semi-wave.

Discretization: second-order central differences (W'' and interior W'),
Dirichlet clamping at the truncation, nonlocal terms by normalized kernel
quadrature on the grid with the profile extended by its boundary values.

Solver notes.  The truncated wave problem is translation-quasi-invariant, so
its Jacobian carries a near-null mode and plain Newton amplifies
truncation-level residuals into runaway interface drift.  The solves here use
Levenberg-Marquardt on the square system (banded normal equations): the trust
region suppresses the quasi-null direction and leaves the phase where the
initial guess put it.  A converged least-squares stall at a residual far
above tolerance is the nonexistence signal min_speed relies on.

Domain widths are capped so the boundary gaps stay representable: if
1 - W underflows below machine epsilon at the left clamp, pairs of
exactly-1.0 nodes force W erroneously to 1 across the grid, so the left width
keeps e^{-mu*width} around 1e-13.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solveh_banded

from . import spectral
from .errors import (
    BracketFailure,
    ComplexRoots,
    MathDomainError,
    MonotonicityLost,
    NoConvergence,
    NoRealRoots,
)
from .models import ModelSpec

MONO_TOL = 1e-12
RANGE_SLACK = 0.01
LEFT_FOLDS = 30.0   # e-folding lengths to the left clamp (keeps 1-W ~ 1e-13)
RIGHT_FOLDS = 30.0  # e-folding lengths to the right clamp
POLY_TAIL_WIDTH = 220.0  # left width when the approach is polynomial (degenerate LV)


@dataclass(eq=False)
class Grid:
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise MathDomainError("grid endpoints must be finite")
        if self.n < 3:
            raise MathDomainError("grid needs at least 3 nodes")
        if self.hi <= self.lo:
            raise MathDomainError("grid requires hi > lo")

    @property
    def h(self):
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def xi(self):
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(eq=False)
class WaveProfile:
    """Converged discrete wave; scalar values shape (n,), competition (2, n)."""

    grid: Grid
    family: str
    c: float
    values: np.ndarray
    left_target: np.ndarray
    right_target: np.ndarray
    residual: float
    _splines: list = field(default=None, repr=False)

    @property
    def W(self):
        return self.values if self.values.ndim == 1 else self.values[0]

    @property
    def U(self):
        return self.values[0]

    @property
    def V(self):
        return self.values[1]

    def components(self):
        return self.values[None, :] if self.values.ndim == 1 else self.values

    def splines(self):
        """Cubic-spline interpolants, one per component."""
        if self._splines is None:
            xi = self.grid.xi
            self._splines = [CubicSpline(xi, comp) for comp in self.components()]
        return self._splines

    def eval(self, x, component=0, derivative=0):
        """Spline evaluation clamped to the boundary targets outside the grid."""
        s = self.splines()[component]
        x = np.asarray(x, dtype=float)
        out = s(x, derivative)
        left = self.left_target[component] if derivative == 0 else 0.0
        right = self.right_target[component] if derivative == 0 else 0.0
        return np.where(x < self.grid.lo, left,
                        np.where(x > self.grid.hi, right, out))


@dataclass(eq=False)
class SemiWave:
    """Half-line profile vanishing at 0, with the boundary-coupling
    coefficient mu recovered from the flux identity."""

    grid: Grid
    c: float
    phi: np.ndarray
    mu: float
    residual: float

    def spline(self):
        return CubicSpline(self.grid.xi, self.phi)


@dataclass
class MinSpeedResult:
    c_star: float
    profile: WaveProfile
    linear_speed: float
    selection: str  # 'linear' (pulled) or 'nonlinear' (pushed)
    tol: float


def _targets(spec):
    if spec.family == "lv":
        lv = spec.lv
        return np.array([lv.u_star, lv.v_star]), np.array([0.0, 1.0])
    return np.array([1.0]), np.array([0.0])


def _tail_rates(spec, c):
    """(right decay rate, left decay rate or None if polynomial)."""
    try:
        rs = spectral.root_set(spec, c)
        return rs.lambda_minus, rs.mu_left
    except (ComplexRoots, NoRealRoots):
        # below the linear speed: size the grid from the double-root scale
        if spec.family == "lv":
            rs = spectral.root_set(spec, spec.lv.linear_speed)
        else:
            rs = spectral.root_set(spec, None)
        right = max(0.5 * c, 0.5 * rs.lambda0) if rs.lambda0 else max(0.5 * c, 0.3)
        return right, rs.mu_left


def default_grid(spec: ModelSpec, c: float, h: float = 0.05,
                 width_left: Optional[float] = None,
                 width_right: Optional[float] = None) -> Grid:
    """Grid sized from the tail rates (see the module notes on width caps)."""
    right_rate, left_rate = _tail_rates(spec, c)
    if width_right is None:
        width_right = min(RIGHT_FOLDS / max(right_rate, 1e-3), 400.0)
    if width_left is None:
        if left_rate is None:
            width_left = POLY_TAIL_WIDTH
        else:
            width_left = min(LEFT_FOLDS / max(left_rate, 1e-3), 400.0)
    if spec.family == "nonlocal":
        # keep the kernel support commensurate with the grid
        L = spec.kernel.half_width
        h = L / max(2, int(round(L / h)))
    nl = int(np.ceil(width_left / h))
    nr = int(np.ceil(width_right / h))
    return Grid(lo=-nl * h, hi=nr * h, n=nl + nr + 1)


def _two_sided_guess(spec, grid, rate_right, rate_left, shift=0.0):
    """Logistic-type profile whose tails carry the family's own decay rates."""
    x = grid.xi - shift
    q = np.where(x >= 0.0, rate_right * x, rate_left * x)
    sig = 1.0 / (1.0 + np.exp(np.clip(q, -500, 500)))
    left, right = _targets(spec)
    if spec.family == "lv":
        u = left[0] * sig
        v = 1.0 - (1.0 - left[1]) * sig
        return np.stack([u, v])
    return sig


def _guess_rates(spec, c):
    try:
        right, left = _tail_rates(spec, c)
    except MathDomainError:
        right, left = 1.0, 1.0
    if left is None:
        left = 0.5
    return float(np.clip(right, 0.1, 4.0)), float(np.clip(left, 0.1, 4.0))


# ---------------------------------------------------------------------------
# residual / Jacobian assembly (banded, solve_banded layout ab[u+i-j, j])


def _assemble_local(f, c, grid, w, left, right):
    h = grid.h
    n = grid.n
    F = np.empty(n)
    F[0] = w[0] - left
    F[-1] = w[-1] - right
    F[1:-1] = ((w[:-2] - 2.0 * w[1:-1] + w[2:]) / h**2
               + c * (w[2:] - w[:-2]) / (2.0 * h)
               + f.f(w[1:-1]))
    ab = np.zeros((3, n))
    ab[0, 2:] = 1.0 / h**2 + c / (2.0 * h)      # A[i, i+1], interior rows
    ab[1, 0] = ab[1, -1] = 1.0
    ab[1, 1:-1] = -2.0 / h**2 + f.fp(w[1:-1])
    ab[2, :-2] = 1.0 / h**2 - c / (2.0 * h)      # A[i, i-1]
    return F, ab, (1, 1)


def _assemble_nonlocal(f, kappa, c, grid, w, left, right):
    from . import kernels

    h = grid.h
    n = grid.n
    K = (len(kappa) - 1) // 2
    conv = kernels.conv_clamped(w, kappa, left, right)
    F = np.empty(n)
    F[0] = w[0] - left
    F[-1] = w[-1] - right
    F[1:-1] = (conv[1:-1] - w[1:-1]
               + c * (w[2:] - w[:-2]) / (2.0 * h)
               + f.f(w[1:-1]))
    ab = np.zeros((2 * K + 1, n))
    for m in range(-K, K + 1):
        ab[K + m, :] = kappa[K + m]          # band m holds A[j+m, j]
    ab[K, :] += -1.0 + f.fp(w)
    ab[K - 1, 2:] += c / (2.0 * h)
    ab[K + 1, :-2] += -c / (2.0 * h)
    for m in range(-K, K + 1):               # boundary rows are identity
        if m == 0:
            continue
        for row in (0, n - 1):
            j = row - m
            if 0 <= j < n:
                ab[K + m, j] = 0.0
    ab[K, 0] = ab[K, n - 1] = 1.0
    return F, ab, (K, K)


def _assemble_lv(lv, c, grid, y, left, right):
    h = grid.h
    n = grid.n
    u = y[0::2]
    v = y[1::2]
    F = np.empty(2 * n)
    F[0] = u[0] - left[0]
    F[1] = v[0] - left[1]
    F[-2] = u[-1] - right[0]
    F[-1] = v[-1] - right[1]
    gu = u * (1.0 - u - lv.a * v)
    gv = lv.r * v * (1.0 - v - lv.b * u)
    F[2:-2:2] = ((u[:-2] - 2.0 * u[1:-1] + u[2:]) / h**2
                 + c * (u[2:] - u[:-2]) / (2.0 * h) + gu[1:-1])
    F[3:-2:2] = (lv.d * (v[:-2] - 2.0 * v[1:-1] + v[2:]) / h**2
                 + c * (v[2:] - v[:-2]) / (2.0 * h) + gv[1:-1])
    ab = np.zeros((5, 2 * n))
    ab[2, 0::2] = -2.0 / h**2 + (1.0 - 2.0 * u - lv.a * v)
    ab[2, 1::2] = -2.0 * lv.d / h**2 + lv.r * (1.0 - 2.0 * v - lv.b * u)
    ab[0, 2::2] = 1.0 / h**2 + c / (2.0 * h)       # A[j-2, j]
    ab[0, 3::2] = lv.d / h**2 + c / (2.0 * h)
    ab[1, 1::2] = -lv.a * u                         # A[j-1, j]: F_u vs V_i
    ab[3, 0::2] = -lv.r * lv.b * v                  # A[j+1, j]: F_v vs U_i
    ab[4, :-2:2] = 1.0 / h**2 - c / (2.0 * h)       # A[j+2, j]
    ab[4, 1:-2:2] = lv.d / h**2 - c / (2.0 * h)
    for m in (-2, -1, 1, 2):
        for row in (0, 1, 2 * n - 2, 2 * n - 1):
            j = row - m
            if 0 <= j < 2 * n:
                ab[2 + m, j] = 0.0
    for row in (0, 1, 2 * n - 2, 2 * n - 1):
        ab[2, row] = 1.0
    return F, ab, (2, 2)


def _make_assembler(spec, c, grid):
    left, right = _targets(spec)
    if spec.family == "local":
        f = spec.nonlinearity
        return lambda y: _assemble_local(f, c, grid, y, left[0], right[0])
    if spec.family == "nonlocal":
        f = spec.nonlinearity
        kappa = spec.kernel.grid_weights(grid.h)
        return lambda y: _assemble_nonlocal(f, kappa, c, grid, y, left[0], right[0])
    lv = spec.lv
    return lambda y: _assemble_lv(lv, c, grid, y, left, right)


def _normal_bands(ab, lu, F):
    """Lower-banded JtJ and the JtF vector for a banded J.

    J is stored solve_banded style: ab[u+m, j] = A[j+m, j], m in [-u, l].
    """
    l, u = lu
    n = ab.shape[1]
    width = l + u
    jtj = np.zeros((width + 1, n))
    for q in range(width + 1):
        for m2 in range(-u, l - q + 1):
            m1 = m2 + q
            j_lo = max(0, -(q + m2))
            j_hi = min(n - q, n - q - m2)
            if j_hi <= j_lo:
                continue
            jj = np.arange(j_lo, j_hi)
            jtj[q, jj] += ab[u + m1, jj] * ab[u + m2, jj + q]
    jtf = np.zeros(n)
    for m in range(-u, l + 1):
        jj = np.arange(max(0, -m), min(n, n - m))
        jtf[jj] += ab[u + m, jj] * F[jj + m]
    return jtj, jtf


def _lm_minimize(assemble, y0, tol, max_iter=200):
    """Levenberg-Marquardt on the square residual system.

    Returns (y, max|F|); y is None when the iteration stalls above tol (the
    least-squares floor -- nonexistence or a bad basin).
    """
    y = y0.copy()
    F, ab, lu = assemble(y)
    res = float(np.max(np.abs(F)))
    mu = 1e-8
    for _ in range(max_iter):
        if res < tol:
            return y, res
        jtj, jtf = _normal_bands(ab, lu, F)
        diag = np.maximum(jtj[0], 1e-300)
        accepted = False
        for _ in range(60):
            bands = jtj.copy()
            bands[0] = jtj[0] + mu * diag
            try:
                step = solveh_banded(bands, -jtf, lower=True)
            except np.linalg.LinAlgError:
                mu *= 4.0
                continue
            if not np.all(np.isfinite(step)):
                mu *= 4.0
                continue
            trial = y + step
            Ft, abt, _ = assemble(trial)
            rt = float(np.max(np.abs(Ft)))
            if np.isfinite(rt) and rt < res:
                y, F, ab, res = trial, Ft, abt, rt
                mu = max(mu / 3.0, 1e-14)
                accepted = True
                break
            mu *= 4.0
            if mu > 1e18:
                break
        if not accepted:
            return None if res >= tol else y, res
    return (y if res < tol else None), res


def _flatten(spec, arr):
    if spec.family == "lv":
        return np.ravel(arr, order="F")  # interleave U, V
    return arr


def _unflatten(spec, y, n):
    if spec.family == "lv":
        return np.stack([y[0::2], y[1::2]])
    return y


def _check_monotone(spec, vals):
    if spec.family == "lv":
        bad_u = np.max(np.diff(vals[0])) if len(vals[0]) > 1 else -1.0
        bad_v = -np.min(np.diff(vals[1])) if len(vals[1]) > 1 else -1.0
        return max(bad_u, bad_v) <= MONO_TOL
    return np.max(np.diff(vals)) <= MONO_TOL


def _check_range(vals):
    return float(np.min(vals)) >= -RANGE_SLACK and float(np.max(vals)) <= 1.0 + RANGE_SLACK


def _crossing_position(xi, comp, level):
    s = comp - level
    idx = np.where((s[:-1] > 0) & (s[1:] <= 0))[0]
    if len(idx) == 0:
        return None
    i = idx[-1]
    return xi[i] + (xi[i + 1] - xi[i]) * s[i] / (s[i] - s[i + 1])


def _phase_shift(spec, grid, vals):
    if spec.family == "lv":
        level = 0.5 * spec.lv.u_star
        return _crossing_position(grid.xi, vals[0], level)
    return _crossing_position(grid.xi, vals, 0.5)


def _resample(spec, grid, vals, shift):
    left, right = _targets(spec)
    comps = vals[None, :] if vals.ndim == 1 else vals
    out = []
    xq = grid.xi + shift
    for k, comp in enumerate(comps):
        s = CubicSpline(grid.xi, comp)
        v = s(xq)
        v = np.where(xq < grid.lo, left[k], np.where(xq > grid.hi, right[k], v))
        out.append(v)
    res = np.stack(out)
    return res[0] if vals.ndim == 1 else res


def solve_wave(spec: ModelSpec, c: float, grid: Optional[Grid] = None,
               tol: float = 1e-10, guess: Optional[np.ndarray] = None) -> WaveProfile:
    """Solve the wave problem at fixed speed c.

    Raises NoConvergence after the damping restart ladder is exhausted
    (interpreted downstream as "no wave at this speed") and MonotonicityLost
    when a converged solution is not monotone.
    """
    if grid is None:
        grid = default_grid(spec, c)
    assemble = _make_assembler(spec, c, grid)
    left, right = _targets(spec)
    kr, kl = _guess_rates(spec, c)
    rungs = [(kr, kl, 0.0), (0.6 * kr, kl, 0.0), (1.6 * kr, kl, 0.0),
             (kr, kl, 4.0), (kr, kl, -4.0)]
    attempts = []
    if guess is not None:
        attempts.append(guess)
    attempts.extend(_two_sided_guess(spec, grid, a, b, s) for a, b, s in rungs)

    y = None
    for a in attempts:
        y, res = _lm_minimize(assemble, _flatten(spec, a), tol)
        if y is not None:
            break
    if y is None:
        raise NoConvergence(
            f"{spec.family} wave at c={c:.6g}: restart ladder exhausted "
            f"(least-squares floor {res:.3e})")
    vals = _unflatten(spec, y, grid.n)
    if not _check_range(vals):
        raise MonotonicityLost(
            f"solution at c={c:.6g} leaves [{-RANGE_SLACK}, {1 + RANGE_SLACK}]",
            profile=vals)
    if not _check_monotone(spec, vals):
        raise MonotonicityLost(
            f"converged solution at c={c:.6g} is not monotone", profile=vals)

    # phase normalization: value crossing at xi = 0, then a polish to restore
    # the discrete residual after resampling
    for _ in range(2):
        shift = _phase_shift(spec, grid, vals)
        if shift is None or abs(shift) < 1e-9:
            break
        vals = _resample(spec, grid, vals, shift)
        y, res = _lm_minimize(assemble, _flatten(spec, vals), tol, max_iter=40)
        if y is None:
            raise NoConvergence(f"phase-normalization polish failed at c={c:.6g}")
        vals = _unflatten(spec, y, grid.n)

    if not _check_monotone(spec, vals):
        raise MonotonicityLost(
            f"profile at c={c:.6g} lost monotonicity after normalization",
            profile=vals)
    F, _, _ = assemble(_flatten(spec, vals))
    residual = float(np.max(np.abs(F)))
    return WaveProfile(grid=grid, family=spec.family, c=c, values=vals,
                       left_target=left, right_target=right, residual=residual)


def discrete_residual(spec: ModelSpec, c: float, grid: Grid,
                      values: np.ndarray) -> float:
    """Max interior residual of the discrete wave equations, assembled
    independently of any solver state."""
    assemble = _make_assembler(spec, c, grid)
    F, _, _ = assemble(_flatten(spec, values))
    interior = F[2:-2] if spec.family == "lv" else F[1:-1]
    return float(np.max(np.abs(interior)))


def _wave_exists(spec, c, tol, grid=None):
    try:
        return solve_wave(spec, c, grid=grid, tol=tol)
    except (NoConvergence, MonotonicityLost):
        return None


DOUBLE_ROOT_SLACK = 2e-8  # keep existence probes off the exact double root


def min_speed(spec: ModelSpec, tol: float = 0.01,
              solver_tol: float = 1e-10) -> MinSpeedResult:
    """Minimal wave speed by bisection on the existence predicate
    (least-squares convergence + monotonicity + residual bound).

    The lower bracket is the linear speed: no monotone front exists below it
    for any of the three families, and sub-linear probes cannot be trusted
    (the tell-tale tail oscillations fall below the floating-point floor).
    A wave found within tol/2 of the linear speed reports linear selection.
    """
    c_lin = spectral.linear_speed(spec)
    probe_c = c_lin * (1.0 + DOUBLE_ROOT_SLACK) + 0.5 * tol
    wave = _wave_exists(spec, probe_c, solver_tol)
    if wave is not None:
        return MinSpeedResult(c_star=c_lin, profile=wave, linear_speed=c_lin,
                              selection="linear", tol=tol)

    hi = None
    for bump in (0.5, 1.0, 2.0, 4.0):
        c_hi = c_lin + bump
        wave_hi = _wave_exists(spec, c_hi, solver_tol)
        if wave_hi is not None:
            hi = c_hi
            break
    if hi is None:
        raise BracketFailure(
            f"no wave found up to c = linear + 4 for family {spec.family}")
    lo = probe_c
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        w = _wave_exists(spec, mid, solver_tol)
        if w is None:
            lo = mid
        else:
            hi, wave_hi = mid, w
    selection = "linear" if hi - c_lin <= tol else "nonlinear"
    c_star = c_lin if selection == "linear" else hi
    return MinSpeedResult(c_star=c_star, profile=wave_hi, linear_speed=c_lin,
                          selection=selection, tol=tol)


def continuation_family(spec: ModelSpec, c_list, grid: Optional[Grid] = None,
                        tol: float = 1e-10):
    """Warm-started sweep of waves at increasing speeds."""
    c_list = list(c_list)
    if c_list != sorted(c_list):
        raise MathDomainError("continuation speeds must be sorted ascending")
    if not c_list:
        return []
    if grid is None:
        grid = default_grid(spec, c_list[-1])
    out = []
    prev = None
    for c in c_list:
        prof = solve_wave(spec, c, grid=grid, tol=tol,
                          guess=None if prev is None else prev.values)
        out.append(prof)
        prev = prof
    return out


# ---------------------------------------------------------------------------
# semi-wave (half-line profile for the free-boundary comparison machinery)


def _assemble_semiwave(f, kappa, c, grid, phi):
    from . import kernels

    h = grid.h
    n = grid.n
    K = (len(kappa) - 1) // 2
    conv = kernels.conv_clamped(phi, kappa, 1.0, 0.0)
    F = np.empty(n)
    F[0] = phi[0] - 1.0
    F[-1] = phi[-1]
    F[1:-1] = (conv[1:-1] - phi[1:-1]
               + c * (phi[2:] - phi[:-2]) / (2.0 * h)
               + f.f(phi[1:-1]))
    ab = np.zeros((2 * K + 1, n))
    for m in range(-K, K + 1):
        ab[K + m, :] = kappa[K + m]
    ab[K, :] += -1.0 + f.fp(phi)
    ab[K - 1, 2:] += c / (2.0 * h)
    ab[K + 1, :-2] += -c / (2.0 * h)
    for m in range(-K, K + 1):
        if m == 0:
            continue
        for row in (0, n - 1):
            j = row - m
            if 0 <= j < n:
                ab[K + m, j] = 0.0
    ab[K, 0] = ab[K, n - 1] = 1.0
    return F, ab, (K, K)


def solve_semiwave(kernel, f, c: float, grid: Optional[Grid] = None,
                   tol: float = 1e-10) -> SemiWave:
    """Nonincreasing half-line profile with value 0 at the right endpoint.

    Exists for speeds strictly between 0 and the nonlocal minimal speed;
    outside that range the restart ladder fails and NoConvergence propagates.
    """
    if c <= 0:
        raise MathDomainError("semi-wave requires positive speed")
    if grid is None:
        mu = spectral.nonlocal_left_root(kernel, f.fp1, c)
        width = min(LEFT_FOLDS / max(mu, 1e-3), 400.0)
        h = kernel.half_width / max(2, int(round(kernel.half_width / 0.05)))
        n = int(np.ceil(width / h))
        grid = Grid(lo=-n * h, hi=0.0, n=n + 1)
    if abs(grid.hi) > 1e-12:
        raise MathDomainError("semi-wave grid must end at 0")
    kappa = kernel.grid_weights(grid.h)
    assemble = lambda y: _assemble_semiwave(f, kappa, c, grid, y)

    y = None
    for steep in (1.0, 0.5, 2.0, 0.25, 4.0):
        guess = 1.0 - np.exp(np.clip(steep * grid.xi, -500, 0))
        y, res = _lm_minimize(assemble, guess, tol)
        if y is not None:
            break
    if y is None:
        raise NoConvergence(
            f"semi-wave at c={c:.6g} did not converge (least-squares floor "
            f"{res:.3e}); consistent with nonexistence at or above the "
            "minimal speed")
    if np.max(np.diff(y)) > MONO_TOL:
        raise MonotonicityLost(f"semi-wave at c={c:.6g} is not nonincreasing",
                               profile=y)
    if not _check_range(y):
        raise MonotonicityLost(f"semi-wave at c={c:.6g} leaves [0,1]", profile=y)
    F, _, _ = assemble(y)
    residual = float(np.max(np.abs(F)))

    # boundary-coupling coefficient: c = mu * integral of the outward flux
    L = kernel.half_width
    xi = grid.xi
    mask = xi >= -L - grid.h
    cdf = np.array([kernel.cdf(x) for x in xi[mask]])
    q = float(np.trapezoid(cdf * y[mask], xi[mask]))
    mu_coef = c / q if q > 0 else np.inf
    return SemiWave(grid=grid, c=c, phi=y, mu=mu_coef, residual=residual)
