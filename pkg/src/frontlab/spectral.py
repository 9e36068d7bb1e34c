"""Characteristic roots, linear speeds, and tail exponents for the three
model families.

Root finding is bracketed (bisection/Brent) and Newton-polished; brackets
come from convexity of the exponential-moment function (nonlocal) or from
closed forms (local and competition families), so no root is missed.
"""

from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BracketFailure, ComplexRoots, NoRealRoots
from .models import Kernel, LVParams, ModelSpec

# Relative tolerance on |c - c_linear| below which the speed is treated as
# critical and a double root is reported.
DOUBLE_ROOT_RTOL = 1e-8

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RootPair:
    """Right-tail decay pair 0 < lambda_minus <= lambda_plus."""

    lam_minus: float
    lam_plus: float
    multiplicity: int
    residual: float

    @property
    def is_double(self):
        return self.multiplicity == 2


@dataclass(frozen=True)
class LeftRootSet:
    """Left-tail exponents of a competition wave (regime-dependent)."""

    mu_u_plus: float
    mu_u_minus: float
    mu_v_plus: Optional[float] = None
    mu_v_minus: Optional[float] = None
    nu: Optional[float] = None
    poly_order: Optional[int] = None  # -1 marks the |xi|^-1 degenerate regime
    residual: float = 0.0


@dataclass
class RootSet:
    """Every root attached to a (model, speed) pair; serializes flat."""

    family: str
    c: float
    linear_speed: float
    multiplicity: int = 1
    lambda_minus: Optional[float] = None
    lambda_plus: Optional[float] = None
    lambda0: Optional[float] = None
    c0_star: Optional[float] = None
    lambda_v_plus: Optional[float] = None
    lambda_v_minus: Optional[float] = None
    lambda_v_cap: Optional[float] = None
    mu_q_plus: Optional[float] = None
    mu_u_plus: Optional[float] = None
    mu_u_minus: Optional[float] = None
    mu_v_plus: Optional[float] = None
    mu_v_minus: Optional[float] = None
    nu: Optional[float] = None
    left_poly_order: Optional[int] = None
    mu_left: Optional[float] = None

    def to_record(self):
        return asdict(self)


def local_roots(fp0: float, c: float, rtol_double: float = DOUBLE_ROOT_RTOL) -> RootPair:
    """Roots of lambda^2 - c*lambda + fp0 = 0 (right tail, local diffusion)."""
    if fp0 <= 0:
        raise ComplexRoots("growth rate at the unstable state must be positive")
    c_lin = 2.0 * np.sqrt(fp0)
    if abs(c - c_lin) <= rtol_double * c_lin:
        lam = np.sqrt(fp0)
        return RootPair(lam, lam, 2, abs(lam * lam - c * lam + fp0))
    if c < c_lin:
        raise ComplexRoots(
            f"speed {c:.6g} below the linear speed {c_lin:.6g}: complex roots")
    disc = np.sqrt(c * c - 4.0 * fp0)
    lam_m = 0.5 * (c - disc)
    lam_p = 0.5 * (c + disc)
    res = max(abs(lam_m**2 - c * lam_m + fp0), abs(lam_p**2 - c * lam_p + fp0))
    return RootPair(lam_m, lam_p, 1, res)


def kernel_laplace(kernel: Kernel, lam: float) -> float:
    """Exponential moment of the dispersal density at rate lam."""
    return kernel.laplace(lam)


def _h(kernel, fp0, lam):
    return kernel.laplace(lam) + fp0 - 1.0


def linear_speed_nonlocal(kernel: Kernel, fp0: float):
    """Variational linear speed: minimize (moment(lam)+fp0-1)/lam over lam>0.

    Returns (c0_star, lam0) where lam0 is the argmin; the first-order
    condition lam*h'(lam) = h(lam) holds to RESIDUAL_TOL.
    """
    if fp0 <= 0:
        raise ComplexRoots("growth rate at the unstable state must be positive")

    def phi(lam):
        return lam * kernel.laplace_d1(lam) - _h(kernel, fp0, lam)

    lo, hi = 1e-8, 1.0
    it = 0
    while phi(hi) < 0.0:
        hi *= 2.0
        it += 1
        if it > 60:
            raise BracketFailure("could not bracket the dispersion minimum")
    lam0 = brentq(phi, lo, hi, xtol=1e-14, rtol=8.9e-16)
    # Newton polish on the first-order condition (phi' = lam * h'')
    for _ in range(3):
        dphi = lam0 * kernel.laplace_d2(lam0)
        lam0 -= phi(lam0) / dphi
    c0 = _h(kernel, fp0, lam0) / lam0
    if abs(phi(lam0)) > RESIDUAL_TOL:
        raise BracketFailure("dispersion minimum did not refine to tolerance")
    return c0, lam0


def nonlocal_roots(kernel: Kernel, fp0: float, c: float,
                   rtol_double: float = DOUBLE_ROOT_RTOL) -> RootPair:
    """Roots of c*lam = moment(lam) + fp0 - 1 for the nonlocal right tail."""
    c0, lam0 = linear_speed_nonlocal(kernel, fp0)
    if abs(c - c0) <= rtol_double * c0:
        res = abs(_h(kernel, fp0, lam0) - c * lam0)
        return RootPair(lam0, lam0, 2, res)
    if c < c0:
        raise NoRealRoots(
            f"speed {c:.6g} below the nonlocal linear speed {c0:.6g}")

    def psi(lam):
        return _h(kernel, fp0, lam) - c * lam

    lam_m = brentq(psi, 1e-12, lam0, xtol=1e-14, rtol=8.9e-16)
    hi = 2.0 * lam0
    it = 0
    while psi(hi) < 0.0:
        hi *= 2.0
        it += 1
        if it > 60:
            raise BracketFailure("could not bracket the fast nonlocal root")
    lam_p = brentq(psi, lam0, hi, xtol=1e-14, rtol=8.9e-16)
    res = max(abs(psi(lam_m)), abs(psi(lam_p)))
    return RootPair(lam_m, lam_p, 1, res)


def nonlocal_left_root(kernel: Kernel, fp1: float, c: float) -> float:
    """Unique positive rate of approach to 1 on the left for nonlocal waves.

    Root of moment(-mu) - 1 + fp1 + c*mu = 0, decreasing in c.
    """
    if fp1 >= 0:
        raise ComplexRoots("f'(1) must be negative")

    def g(mu):
        return kernel.laplace(-mu) - 1.0 + fp1 + c * mu

    hi = 1.0
    it = 0
    while g(hi) < 0.0:
        hi *= 2.0
        it += 1
        if it > 200:
            raise BracketFailure("could not bracket the left nonlocal root")
    return brentq(g, 1e-14, hi, xtol=1e-14, rtol=8.9e-16)


def lv_roots(lv: LVParams, c: float, rtol_double: float = DOUBLE_ROOT_RTOL) -> RootSet:
    """Right-tail roots of the competition wave at speed c."""
    c_lin = lv.linear_speed
    rs = RootSet(family="lv", c=c, linear_speed=c_lin, c0_star=c_lin,
                 lambda0=np.sqrt(1.0 - lv.a))
    if abs(c - c_lin) <= rtol_double * c_lin:
        rs.lambda_minus = rs.lambda_plus = rs.lambda0
        rs.multiplicity = 2
    elif c < c_lin:
        raise ComplexRoots(
            f"speed {c:.6g} below the linear speed {c_lin:.6g}: complex roots")
    else:
        disc = np.sqrt(c * c - 4.0 * (1.0 - lv.a))
        rs.lambda_minus = 0.5 * (c - disc)
        rs.lambda_plus = 0.5 * (c + disc)
    dv = np.sqrt(c * c + 4.0 * lv.r * lv.d)
    rs.lambda_v_plus = (c + dv) / (2.0 * lv.d)
    rs.lambda_v_minus = (c - dv) / (2.0 * lv.d)
    rs.lambda_v_cap = min(rs.lambda_minus, rs.lambda_v_plus)
    return rs


def _rho_quartic(lv, c, lam):
    us, vs = lv.u_star, lv.v_star
    return ((lam**2 + c * lam - us) * (lv.d * lam**2 + c * lam - lv.r * vs)
            - lv.r * lv.a * lv.b * us * vs)


def lv_left_roots(lv: LVParams, c: float) -> LeftRootSet:
    """Left-tail exponents; regime determined by the competition strength b."""
    if c <= 0:
        raise ComplexRoots("left roots require positive speed")
    du = np.sqrt(c * c + 4.0)
    mu_u_p = 0.5 * (-c + du)
    mu_u_m = 0.5 * (-c - du)
    if lv.b > 1.0:
        dv = np.sqrt(c * c + 4.0 * lv.r * lv.d * (lv.b - 1.0))
        mu_v_p = (-c + dv) / (2.0 * lv.d)
        mu_v_m = (-c - dv) / (2.0 * lv.d)
        res = max(abs(mu_u_p**2 + c * mu_u_p - 1.0),
                  abs(lv.d * mu_v_p**2 + c * mu_v_p + lv.r * (1.0 - lv.b)))
        return LeftRootSet(mu_u_p, mu_u_m, mu_v_p, mu_v_m, residual=res)
    if lv.b == 1.0:
        return LeftRootSet(mu_u_p, mu_u_m, poly_order=-1)
    # weak competition: smallest positive zero of the coupled quartic
    lam_grid = np.linspace(1e-6, 10.0, 20001)
    vals = _rho_quartic(lv, c, lam_grid)
    roots = []
    sign_change = np.where(np.diff(np.sign(vals)) != 0)[0]
    for i in sign_change:
        roots.append(brentq(lambda t: _rho_quartic(lv, c, t),
                            lam_grid[i], lam_grid[i + 1],
                            xtol=1e-14, rtol=8.9e-16))
    if not roots:
        raise NoRealRoots("coupled quartic has no positive zero on (0, 10]")
    nu = min(roots)
    # Newton polish for the residual bound
    for _ in range(3):
        eps = 1e-7
        d = (_rho_quartic(lv, c, nu + eps) - _rho_quartic(lv, c, nu - eps)) / (2 * eps)
        nu -= _rho_quartic(lv, c, nu) / d
    return LeftRootSet(mu_u_p, mu_u_m, nu=nu, residual=abs(_rho_quartic(lv, c, nu)))


def linear_speed(spec: ModelSpec) -> float:
    """Linearly selected spreading speed of the family."""
    if spec.family == "local":
        return 2.0 * np.sqrt(spec.nonlinearity.fp0)
    if spec.family == "nonlocal":
        return linear_speed_nonlocal(spec.kernel, spec.nonlinearity.fp0)[0]
    return spec.lv.linear_speed


def root_set(spec: ModelSpec, c: Optional[float] = None) -> RootSet:
    """Assemble the full root record for (model, speed); c=None uses the
    linear speed (reporting the double root)."""
    if spec.family == "local":
        f = spec.nonlinearity
        c_lin = 2.0 * np.sqrt(f.fp0)
        if c is None:
            c = c_lin
        pair = local_roots(f.fp0, c)
        mu = 0.5 * (-c + np.sqrt(c * c - 4.0 * f.fp1))
        return RootSet(family="local", c=c, linear_speed=c_lin, c0_star=c_lin,
                       lambda_minus=pair.lam_minus, lambda_plus=pair.lam_plus,
                       lambda0=np.sqrt(f.fp0), multiplicity=pair.multiplicity,
                       mu_left=mu)
    if spec.family == "nonlocal":
        f, k = spec.nonlinearity, spec.kernel
        c0, lam0 = linear_speed_nonlocal(k, f.fp0)
        if c is None:
            c = c0
        pair = nonlocal_roots(k, f.fp0, c)
        mu_q = nonlocal_left_root(k, f.fp1, c)
        return RootSet(family="nonlocal", c=c, linear_speed=c0, c0_star=c0,
                       lambda_minus=pair.lam_minus, lambda_plus=pair.lam_plus,
                       lambda0=lam0, multiplicity=pair.multiplicity,
                       mu_q_plus=mu_q, mu_left=mu_q)
    lv = spec.lv
    if c is None:
        c = lv.linear_speed
    rs = lv_roots(lv, c)
    left = lv_left_roots(lv, c)
    rs.mu_u_plus = left.mu_u_plus
    rs.mu_u_minus = left.mu_u_minus
    rs.mu_v_plus = left.mu_v_plus
    rs.mu_v_minus = left.mu_v_minus
    rs.nu = left.nu
    rs.left_poly_order = left.poly_order
    if lv.b > 1.0:
        rs.mu_left = min(left.mu_u_plus, left.mu_v_plus)
    elif lv.b < 1.0:
        rs.mu_left = left.nu
    else:
        rs.mu_left = None
    return rs
