"""Numba-compiled hot kernels; mirror of `_kernels_np`."""

import numpy as np
from numba import njit


@njit(cache=True)
def polyval_ascending(coefs, w):
    out = np.zeros_like(w)
    for j in range(len(coefs) - 1, -1, -1):
        out = out * w + coefs[j]
    return out


@njit(cache=True)
def _wval(w, i, left_val, right_val):
    if i < 0:
        return left_val
    if i >= len(w):
        return right_val
    return w[i]


@njit(cache=True)
def conv_clamped(w, kappa, left_val, right_val):
    n = len(w)
    k_half = (len(kappa) - 1) // 2
    out = np.empty(n)
    for i in range(n):
        acc = 0.0
        for k in range(-k_half, k_half + 1):
            acc += kappa[k_half + k] * _wval(w, i - k, left_val, right_val)
        out[i] = acc
    return out


@njit(cache=True)
def thomas(dl, dd, du, rhs):
    n = len(dd)
    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = du[0] / dd[0]
    dp[0] = rhs[0] / dd[0]
    for i in range(1, n):
        m = dd[i] - dl[i] * cp[i - 1]
        cp[i] = du[i] / m
        dp[i] = (rhs[i] - dl[i] * dp[i - 1]) / m
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit(cache=True)
def _cn_bands(n, mu):
    dl = np.full(n, -mu)
    dd = np.full(n, 1.0 + 2.0 * mu)
    du = np.full(n, -mu)
    dl[0] = 0.0
    du[0] = 0.0
    dl[n - 1] = 0.0
    du[n - 1] = 0.0
    dd[0] = 1.0
    dd[n - 1] = 1.0
    return dl, dd, du


@njit(cache=True)
def step_scalar_local(w, r, dt, nsteps, coefs, left_val, right_val):
    w = w.copy()
    n = len(w)
    mu = 0.5 * r
    dl, dd, du = _cn_bands(n, mu)
    rhs = np.empty(n)
    for _ in range(nsteps):
        f = polyval_ascending(coefs, w)
        for i in range(1, n - 1):
            rhs[i] = w[i] + dt * f[i] + mu * (w[i - 1] - 2.0 * w[i] + w[i + 1])
        rhs[0] = left_val
        rhs[n - 1] = right_val
        w = thomas(dl, dd, du, rhs)
    return w


@njit(cache=True)
def step_scalar_nonlocal(w, kappa, dt, nsteps, coefs, left_val, right_val):
    w = w.copy()
    n = len(w)
    for _ in range(nsteps):
        conv = conv_clamped(w, kappa, left_val, right_val)
        f = polyval_ascending(coefs, w)
        wn = np.empty(n)
        for i in range(n):
            wn[i] = w[i] + dt * (conv[i] - w[i] + f[i])
        wn[0] = left_val
        wn[n - 1] = right_val
        w = wn
    return w


@njit(cache=True)
def step_lv(u, v, d, rgrow, a, b, r, dt, nsteps, ul, vl, ur, vr):
    u = u.copy()
    v = v.copy()
    n = len(u)
    mu_u = 0.5 * r
    mu_v = 0.5 * d * r
    dlu, ddu, duu = _cn_bands(n, mu_u)
    dlv, ddv, duv = _cn_bands(n, mu_v)
    rhs_u = np.empty(n)
    rhs_v = np.empty(n)
    for _ in range(nsteps):
        for i in range(1, n - 1):
            fu = u[i] * (1.0 - u[i] - a * v[i])
            fv = rgrow * v[i] * (1.0 - v[i] - b * u[i])
            rhs_u[i] = u[i] + dt * fu + mu_u * (u[i - 1] - 2.0 * u[i] + u[i + 1])
            rhs_v[i] = v[i] + dt * fv + mu_v * (v[i - 1] - 2.0 * v[i] + v[i + 1])
        rhs_u[0], rhs_u[n - 1] = ul, ur
        rhs_v[0], rhs_v[n - 1] = vl, vr
        u = thomas(dlu, ddu, duu, rhs_u)
        v = thomas(dlv, ddv, duv, rhs_v)
    return u, v
