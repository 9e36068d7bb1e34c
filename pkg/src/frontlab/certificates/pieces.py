"""Analytic piecewise profiles for super/sub-solution certificates.

Every piece represents one component as alpha(xi) + beta(xi) * base(xi),
where alpha and beta are small sums of closed-form terms and `base` is the
(spline-interpolated) wave the certificate modifies.  This form is what lets
the verifier cancel the base wave's own equation exactly instead of paying
the O(h^2) price of differentiating the interpolant twice.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..errors import DiscontinuityDetected

CONTINUITY_TOL = 1e-10


class Term:
    def val(self, x):
        raise NotImplementedError

    def d1(self, x):
        raise NotImplementedError

    def d2(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Term):
    c: float

    def val(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)

    def d1(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    d2 = d1


@dataclass(frozen=True)
class Exp(Term):
    """A * exp(s * xi)"""

    A: float
    s: float

    def val(self, x):
        return self.A * np.exp(self.s * np.asarray(x, dtype=float))

    def d1(self, x):
        return self.s * self.val(x)

    def d2(self, x):
        return self.s**2 * self.val(x)


@dataclass(frozen=True)
class LinExp(Term):
    """A * (xi - x0) * exp(s * xi)"""

    A: float
    s: float
    x0: float

    def val(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * (x - self.x0) * np.exp(self.s * x)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * np.exp(self.s * x) * (1.0 + self.s * (x - self.x0))

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * np.exp(self.s * x) * self.s * (2.0 + self.s * (x - self.x0))


@dataclass(frozen=True)
class Sin(Term):
    """A * sin(om * (xi - x0))"""

    A: float
    om: float
    x0: float

    def val(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * np.sin(self.om * (x - self.x0))

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * self.om * np.cos(self.om * (x - self.x0))

    def d2(self, x):
        return -self.om**2 * self.val(x)


@dataclass(frozen=True)
class Pow(Term):
    """A * (-xi)^theta, defined for xi < 0"""

    A: float
    theta: float

    def val(self, x):
        x = np.asarray(x, dtype=float)
        return self.A * np.power(np.maximum(-x, 1e-300), self.theta)

    def d1(self, x):
        x = np.asarray(x, dtype=float)
        return -self.A * self.theta * np.power(np.maximum(-x, 1e-300), self.theta - 1.0)

    def d2(self, x):
        x = np.asarray(x, dtype=float)
        return (self.A * self.theta * (self.theta - 1.0)
                * np.power(np.maximum(-x, 1e-300), self.theta - 2.0))


@dataclass(frozen=True)
class Descriptor:
    """Finite sum of closed-form terms."""

    terms: tuple = ()

    def val(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for t in self.terms:
            out = out + t.val(x)
        return out

    def d1(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for t in self.terms:
            out = out + t.d1(x)
        return out

    def d2(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for t in self.terms:
            out = out + t.d2(x)
        return out

    @property
    def is_zero(self):
        return len(self.terms) == 0


ZERO = Descriptor()
ONE = Descriptor((Const(1.0),))


@dataclass
class Piece:
    lo: float
    hi: float
    alpha: Descriptor
    beta: Descriptor
    label: str = ""

    @property
    def uses_base(self):
        return not self.beta.is_zero


@dataclass
class BaseFunction:
    """Evaluable bundle for the underlying profile component: spline values
    and first derivative, clamped-constant outside [lo, hi]."""

    spline: Callable
    lo: float
    hi: float
    left_value: float
    right_value: float
    shift: float = 0.0  # evaluate at (x - shift)

    def val(self, x):
        x = np.asarray(x, dtype=float) - self.shift
        out = self.spline(np.clip(x, self.lo, self.hi))
        return np.where(x < self.lo, self.left_value,
                        np.where(x > self.hi, self.right_value, out))

    def d1(self, x):
        x = np.asarray(x, dtype=float) - self.shift
        out = self.spline(np.clip(x, self.lo, self.hi), 1)
        return np.where((x < self.lo) | (x > self.hi), 0.0, out)


@dataclass
class PiecewiseProfile:
    """One component of a certificate profile: ordered pieces covering the
    line, each piece alpha + beta * base."""

    pieces: list
    base: Optional[BaseFunction]
    kind: str = "super"          # 'super' | 'sub'
    clamp_rule: str = ""
    label: str = ""
    base_speed: float = 0.0      # speed of the underlying wave's equation
    base_residual: float = 0.0   # its certified discrete residual
    knot_spacing: float = 0.05   # base-grid spacing (quadrature alignment)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for p, q in zip(self.pieces, self.pieces[1:]):
            if not np.isclose(p.hi, q.lo, rtol=0, atol=1e-12):
                raise DiscontinuityDetected(
                    f"pieces do not tile the line: {p.hi} vs {q.lo}")

    @property
    def junctions(self):
        return [p.hi for p in self.pieces[:-1]]

    def _piece_index(self, x):
        edges = np.array([p.hi for p in self.pieces[:-1]])
        return np.searchsorted(edges, x, side="left")

    def _eval_piece(self, k, x, derivative=0):
        p = self.pieces[k]
        if derivative == 0:
            out = p.alpha.val(x)
            if p.uses_base:
                out = out + p.beta.val(x) * self.base.val(x)
            return out
        out = p.alpha.d1(x)
        if p.uses_base:
            out = out + p.beta.d1(x) * self.base.val(x) \
                + p.beta.val(x) * self.base.d1(x)
        return out

    def value(self, x):
        x = np.asarray(x, dtype=float)
        idx = self._piece_index(x)
        out = np.empty_like(x)
        for k in range(len(self.pieces)):
            m = idx == k
            if np.any(m):
                out[m] = self._eval_piece(k, x[m])
        return out

    def deriv_one_sided(self, junction_index, side):
        """First derivative at a junction from the left or right piece."""
        x = self.junctions[junction_index]
        k = junction_index if side == "left" else junction_index + 1
        return float(self._eval_piece(k, np.array([x]), derivative=1)[0])

    def continuity_residuals(self):
        out = []
        for j in range(len(self.junctions)):
            x = np.array([self.junctions[j]])
            left = self._eval_piece(j, x)[0]
            right = self._eval_piece(j + 1, x)[0]
            out.append(float(abs(left - right)))
        return out

    def check_continuity(self, tol=CONTINUITY_TOL):
        res = self.continuity_residuals()
        bad = [((self.junctions[i]), r) for i, r in enumerate(res) if r > tol]
        if bad:
            raise DiscontinuityDetected(
                f"profile {self.label!r} discontinuous at {bad}")
        return res

    def modifier(self, x):
        """R(x) := base(x) - value(x) where a base exists (the certificate's
        modification), else -value(x)."""
        if self.base is None:
            return -self.value(x)
        return self.base.val(x) - self.value(x)
