"""Pure-numpy reference implementations of the hot kernels.

Semantics must match `_kernels_nb` to ~1e-12; the backend is selected in
`kernels` via the FRONTLAB_DISABLE_NUMBA environment flag.
"""

import numpy as np
from scipy.linalg import solve_banded


def polyval_ascending(coefs, w):
    """Evaluate sum_j coefs[j] * w**j (Horner)."""
    out = np.zeros_like(np.asarray(w, dtype=float))
    for c in coefs[::-1]:
        out = out * w + c
    return out


def conv_clamped(w, kappa, left_val, right_val):
    """Banded convolution sum_k kappa[K+k] * w[i-k] with clamp extension.

    kappa holds weights for offsets -K..K; values outside the grid are the
    boundary clamps.
    """
    k_half = (len(kappa) - 1) // 2
    wext = np.concatenate(
        [np.full(k_half, left_val), w, np.full(k_half, right_val)]
    )
    return np.convolve(wext, kappa, mode="valid")


def thomas(dl, dd, du, rhs):
    """Tridiagonal solve; dl[i] multiplies x[i-1], du[i] multiplies x[i+1]."""
    n = len(dd)
    ab = np.zeros((3, n))
    ab[0, 1:] = du[:-1]
    ab[1, :] = dd
    ab[2, :-1] = dl[1:]
    return solve_banded((1, 1), ab, rhs)


def _cn_bands(n, mu):
    dl = np.full(n, -mu)
    dd = np.full(n, 1.0 + 2.0 * mu)
    du = np.full(n, -mu)
    dl[0] = du[0] = dl[-1] = du[-1] = 0.0
    dd[0] = dd[-1] = 1.0
    return dl, dd, du


def step_scalar_local(w, r, dt, nsteps, coefs, left_val, right_val):
    """Crank-Nicolson diffusion + explicit reaction, Dirichlet clamps."""
    w = w.copy()
    n = len(w)
    mu = 0.5 * r
    dl, dd, du = _cn_bands(n, mu)
    for _ in range(nsteps):
        rhs = w + dt * polyval_ascending(coefs, w)
        rhs[1:-1] += mu * (w[:-2] - 2.0 * w[1:-1] + w[2:])
        rhs[0] = left_val
        rhs[-1] = right_val
        w = thomas(dl, dd, du, rhs)
    return w


def step_scalar_nonlocal(w, kappa, dt, nsteps, coefs, left_val, right_val):
    """Fully explicit stepping of the dispersal operator plus reaction."""
    w = w.copy()
    for _ in range(nsteps):
        conv = conv_clamped(w, kappa, left_val, right_val)
        w = w + dt * (conv - w + polyval_ascending(coefs, w))
        w[0] = left_val
        w[-1] = right_val
    return w


def step_lv(u, v, d, rgrow, a, b, r, dt, nsteps, ul, vl, ur, vr):
    """Coupled competition stepper: CN diffusion per component, explicit reaction."""
    u = u.copy()
    v = v.copy()
    n = len(u)
    mu_u = 0.5 * r
    mu_v = 0.5 * d * r
    dlu, ddu, duu = _cn_bands(n, mu_u)
    dlv, ddv, duv = _cn_bands(n, mu_v)
    for _ in range(nsteps):
        fu = u * (1.0 - u - a * v)
        fv = rgrow * v * (1.0 - v - b * u)
        rhs_u = u + dt * fu
        rhs_u[1:-1] += mu_u * (u[:-2] - 2.0 * u[1:-1] + u[2:])
        rhs_v = v + dt * fv
        rhs_v[1:-1] += mu_v * (v[:-2] - 2.0 * v[1:-1] + v[2:])
        rhs_u[0], rhs_u[-1] = ul, ur
        rhs_v[0], rhs_v[-1] = vl, vr
        u = thomas(dlu, ddu, duu, rhs_u)
        v = thomas(dlv, ddv, duv, rhs_v)
    return u, v
