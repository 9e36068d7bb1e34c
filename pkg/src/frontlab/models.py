"""Model families: monostable nonlinearities, dispersal kernels, competition
parameters, and the named presets used throughout the test suite.

All objects are treated as immutable after construction and are safe to share
across threads.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from .errors import ConfigError

# f is evaluated slightly beyond [0, 1] so explicit steppers may overshoot
# the equilibria without leaving the evaluator's domain.
EXTENSION = 0.05

_GL_PANELS = 24
_GL_NODES = 12


@dataclass(eq=False)
class Nonlinearity:
    """Monostable reaction term with its first two derivatives.

    kinds: 'kpp' (w(1-w)), 'hadeler-rothe' (w(1-w)(1+nu*w)), 'tabulated'
    (cubic-spline interpolant; derivatives are the spline's).
    """

    kind: str
    nu: Optional[float] = None
    spline: object = None

    def f(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "kpp":
            return w * (1.0 - w)
        if self.kind == "hadeler-rothe":
            return w * (1.0 - w) * (1.0 + self.nu * w)
        return self.spline(w)

    def fp(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "kpp":
            return 1.0 - 2.0 * w
        if self.kind == "hadeler-rothe":
            nu = self.nu
            return 1.0 + 2.0 * (nu - 1.0) * w - 3.0 * nu * w * w
        return self.spline(w, 1)

    def fpp(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "kpp":
            return np.full_like(w, -2.0)
        if self.kind == "hadeler-rothe":
            return 2.0 * (self.nu - 1.0) - 6.0 * self.nu * w
        return self.spline(w, 2)

    @property
    def fp0(self):
        return float(self.fp(0.0))

    @property
    def fp1(self):
        return float(self.fp(1.0))

    @property
    def poly_coefs(self):
        """Ascending polynomial coefficients, or None for tabulated kinds."""
        if self.kind == "kpp":
            return np.array([0.0, 1.0, -1.0])
        if self.kind == "hadeler-rothe":
            return np.array([0.0, 1.0, self.nu - 1.0, -self.nu])
        return None

    def sup_abs_fp(self, lo=0.0, hi=1.0, n=4001):
        w = np.linspace(lo, hi, n)
        return float(np.max(np.abs(self.fp(w))))


def kpp_nonlinearity():
    return Nonlinearity(kind="kpp")


def hadeler_rothe(nu):
    if nu <= 0:
        raise ConfigError("hadeler-rothe parameter nu must be positive")
    return Nonlinearity(kind="hadeler-rothe", nu=float(nu))


def tabulated_nonlinearity(w_samples, f_samples):
    """Cubic-spline nonlinearity through the given samples.

    The samples must include w=0 and w=1 with f=0 there; derivatives used in
    constraint checks come from the spline itself.
    """
    w = np.asarray(w_samples, dtype=float)
    fw = np.asarray(f_samples, dtype=float)
    if w[0] > 0.0 or w[-1] < 1.0:
        raise ConfigError("tabulated samples must cover [0, 1]")
    return Nonlinearity(kind="tabulated", spline=CubicSpline(w, fw))


def _composite_gl(lo, hi, panels=_GL_PANELS, nodes=_GL_NODES):
    xg, wg = leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


@dataclass(eq=False)
class Kernel:
    """Compactly supported symmetric dispersal density on [-L, L].

    Quadrature is composite Gauss-Legendre, fine enough that a degree-20
    polynomial integrates exactly; the exponential moments used in
    root-finding carry far more headroom than the 1e-10 mass tolerance.
    """

    kind: str
    half_width: float
    _qx: np.ndarray = field(default=None, repr=False)
    _qw: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ConfigError("kernel half-width must be positive")
        if self._qx is None:
            self._qx, self._qw = _composite_gl(-self.half_width, self.half_width)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        L = self.half_width
        inside = np.abs(x) <= L
        if self.kind == "uniform":
            return np.where(inside, 0.5 / L, 0.0)
        if self.kind == "triangular":
            return np.where(inside, np.maximum(L - np.abs(x), 0.0) / L**2, 0.0)
        if self.kind == "cosine":
            return np.where(inside, (1.0 + np.cos(np.pi * x / L)) / (2.0 * L), 0.0)
        raise ConfigError(f"unknown kernel kind {self.kind!r}")

    def mass(self):
        return float(np.sum(self._qw * self.density(self._qx)))

    def laplace(self, lam):
        """Exponential moment integral of J at rate lam."""
        return float(np.sum(self._qw * self.density(self._qx) * np.exp(lam * self._qx)))

    def laplace_d1(self, lam):
        return float(
            np.sum(self._qw * self.density(self._qx) * self._qx * np.exp(lam * self._qx))
        )

    def laplace_d2(self, lam):
        return float(
            np.sum(self._qw * self.density(self._qx) * self._qx**2 * np.exp(lam * self._qx))
        )

    def cdf(self, x):
        """Integral of J over (-inf, x]."""
        L = self.half_width
        if x <= -L:
            return 0.0
        if x >= L:
            return 1.0
        qx, qw = _composite_gl(-L, float(x))
        return float(np.sum(qw * self.density(qx)))

    def grid_weights(self, h):
        """Discrete convolution weights on a uniform grid of spacing h.

        Trapezoid sampling on the support, normalized to unit sum so the
        discrete operator conserves mass exactly.
        """
        L = self.half_width
        k_half = int(round(L / h))
        if k_half < 2:
            raise ConfigError("grid spacing too coarse for the kernel support")
        offsets = np.arange(-k_half, k_half + 1) * h
        wt = self.density(offsets) * h
        if abs(k_half * h - L) < 1e-9 * max(1.0, L):
            wt[0] *= 0.5
            wt[-1] *= 0.5
        return wt / wt.sum()


def uniform_kernel(half_width=1.0):
    return Kernel(kind="uniform", half_width=float(half_width))


def triangular_kernel(half_width=1.0):
    return Kernel(kind="triangular", half_width=float(half_width))


def cosine_kernel(half_width=1.0):
    return Kernel(kind="cosine", half_width=float(half_width))


@dataclass(frozen=True)
class LVParams:
    """Competition parameters (d, r diffusion/growth of the resident; a, b
    competition coefficients).  Hypothesis: 0 < a < 1, b > 0."""

    d: float
    r: float
    a: float
    b: float

    @property
    def u_star(self):
        if self.b >= 1.0:
            return 1.0
        return (1.0 - self.a) / (1.0 - self.a * self.b)

    @property
    def v_star(self):
        if self.b >= 1.0:
            return 0.0
        return (1.0 - self.b) / (1.0 - self.a * self.b)

    @property
    def linear_speed(self):
        return 2.0 * np.sqrt(1.0 - self.a)


@dataclass(eq=False)
class ModelSpec:
    """One of the three model families with exactly its own fields set."""

    family: str  # 'local' | 'nonlocal' | 'lv'
    nonlinearity: Optional[Nonlinearity] = None
    kernel: Optional[Kernel] = None
    lv: Optional[LVParams] = None
    name: str = ""

    def __post_init__(self):
        if self.family not in ("local", "nonlocal", "lv"):
            raise ConfigError(f"unknown family {self.family!r}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _check(checks, name, ok, detail=""):
    checks.append(CheckResult(name=name, passed=bool(ok), detail=detail))


def _validate_nonlinearity(f, checks):
    _check(checks, "f(0)=0", abs(float(f.f(0.0))) < 1e-12, f"f(0)={float(f.f(0.0)):.3e}")
    _check(checks, "f(1)=0", abs(float(f.f(1.0))) < 1e-12, f"f(1)={float(f.f(1.0)):.3e}")
    _check(checks, "f'(0)>0", f.fp0 > 0.0, f"f'(0)={f.fp0:.6g}")
    _check(checks, "f'(1)<0", f.fp1 < 0.0, f"f'(1)={f.fp1:.6g}")
    w = np.linspace(0.0, 1.0, 1002)[1:-1]
    vals = f.f(w)
    if np.all(vals > 0.0):
        _check(checks, "f>0 on (0,1)", True)
    else:
        i = int(np.argmin(vals))
        _check(checks, "f>0 on (0,1)", False, f"f({w[i]:.4f})={vals[i]:.3e}")


def _validate_kernel(k, checks):
    x = np.linspace(0.0, k.half_width, 513)
    jp = k.density(x)
    jm = k.density(-x)
    _check(checks, "J>=0", bool(np.all(jp >= 0.0)))
    sym = float(np.max(np.abs(jp - jm)))
    _check(checks, "J symmetric", sym < 1e-12, f"max asymmetry {sym:.3e}")
    m = k.mass()
    _check(checks, "unit mass", abs(m - 1.0) < 1e-10, f"mass={m:.15g}")
    outside = float(
        np.max(np.abs(k.density(np.array([-2.0, -1.5, 1.5, 2.0]) * k.half_width))))
    _check(checks, "compact support", outside == 0.0)


def _validate_lv(lv, checks):
    _check(checks, "d>0", lv.d > 0, f"d={lv.d}")
    _check(checks, "r>0", lv.r > 0, f"r={lv.r}")
    _check(checks, "0<a<1", 0.0 < lv.a < 1.0, f"a out of (0,1): a={lv.a}" if not 0.0 < lv.a < 1.0 else f"a={lv.a}")
    _check(checks, "b>0", lv.b > 0, f"b={lv.b}")
    us, vs = lv.u_star, lv.v_star
    _check(checks, "equilibrium in box", 0.0 <= us <= 1.0 and 0.0 <= vs <= 1.0,
           f"(u*,v*)=({us:.6g},{vs:.6g})")
    if lv.b < 1.0:
        res = max(abs(us * (1.0 - us - lv.a * vs)),
                  abs(lv.r * vs * (1.0 - vs - lv.b * us)))
        _check(checks, "equilibrium residual", res < 1e-12, f"residual={res:.3e}")


def validate(spec: ModelSpec) -> ValidationReport:
    """Per-invariant pass/fail report; never raises on bad parameter values."""
    checks = []
    want = {
        "local": ("nonlinearity",),
        "nonlocal": ("nonlinearity", "kernel"),
        "lv": ("lv",),
    }[spec.family]
    for fieldname in ("nonlinearity", "kernel", "lv"):
        present = getattr(spec, fieldname) is not None
        if fieldname in want:
            _check(checks, f"{fieldname} present", present)
        else:
            _check(checks, f"{fieldname} absent", not present)
    if spec.nonlinearity is not None and "nonlinearity" in want:
        _validate_nonlinearity(spec.nonlinearity, checks)
    if spec.kernel is not None and "kernel" in want:
        _validate_kernel(spec.kernel, checks)
    if spec.lv is not None and "lv" in want:
        _validate_lv(spec.lv, checks)
    return ValidationReport(checks=checks)


def _presets():
    return {
        "kpp": lambda: ModelSpec(family="local", nonlinearity=kpp_nonlinearity(),
                                 name="kpp"),
        "hr-nu4": lambda: ModelSpec(family="local", nonlinearity=hadeler_rothe(4.0),
                                    name="hr-nu4"),
        "nonlocal-kpp-uniform": lambda: ModelSpec(
            family="nonlocal", nonlinearity=kpp_nonlinearity(),
            kernel=uniform_kernel(1.0), name="nonlocal-kpp-uniform"),
        "lv-strongweak": lambda: ModelSpec(
            family="lv", lv=LVParams(d=1.0, r=1.0, a=0.5, b=2.0), name="lv-strongweak"),
        "lv-critical": lambda: ModelSpec(
            family="lv", lv=LVParams(d=1.0, r=1.0, a=0.5, b=1.0), name="lv-critical"),
        "lv-weak": lambda: ModelSpec(
            family="lv", lv=LVParams(d=1.0, r=1.0, a=0.5, b=0.5), name="lv-weak"),
    }


PRESET_NAMES = tuple(sorted(_presets().keys()))


def preset(name: str) -> ModelSpec:
    """Fully validated model from the named catalog (see PRESET_NAMES)."""
    try:
        builder = _presets()[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
    spec = builder()
    report = validate(spec)
    if not report.passed:
        raise ConfigError(f"preset {name!r} failed validation: {report.failures()}")
    return spec
