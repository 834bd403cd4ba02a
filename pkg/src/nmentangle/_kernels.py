"""Compiled fixed-step RK4 loops.

The rate formulas are restated here in scalar form so the loops can run
without Python callbacks; they must stay in sync with ``rates``.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _omdc(x, y):
    return -math.expm1(-x) + 2.0 * math.exp(-x) * math.sin(0.5 * y) ** 2


@njit(cache=True)
def _rate(gam, lam, w, t):
    x = math.exp(-lam * t)
    return gam * lam / (lam * lam + w * w) * (lam * _omdc(lam * t, w * t) + w * x * math.sin(w * t))


@njit(cache=True)
def _shift_rate(gam, lam, w, t):
    n = lam * lam + w * w
    x = math.exp(-lam * t)
    c = math.cos(w * t)
    s = math.sin(w * t)
    return gam * lam / (2.0 * n) * (
        w + 2.0 * w / n * (lam * x * c + w * x * s) + (lam * lam - w * w) / n * (w * x * c - lam * x * s)
    )


@njit(cache=True)
def _coeffs(t, J, lam, gam, out):
    out[0] = _rate(gam, lam, J, t)
    out[1] = _rate(gam, lam, 3.0 * J, t)
    out[2] = _shift_rate(gam, lam, J, t) + _shift_rate(gam, lam, 3.0 * J, t)


@njit(cache=True)
def _reduced_rhs(y, co, J, trace_mode, out):
    eta, sig, s1dot = co[0], co[1], co[2]
    half = 0.5 * (eta + sig)
    ka = 2.0 * half if trace_mode else half
    a, b, e = y[0], y[1], y[2]
    out[0] = -ka * a
    out[1] = -eta * b + eta * a
    out[2] = -sig * e + sig * a
    out[3] = eta * b + sig * e
    out[4] = -(1j * s1dot + half) * y[4]
    out[5] = -(1j * (2.0 * J + s1dot) + half) * y[5]


@njit(cache=True)
def rk4_reduced(Y0, trace_modes, t0, h, nsteps, J, lam, gam):
    """Advance rows (a, b, e, d, c, h) of Y0 by nsteps RK4 steps of size h.

    All rows share the rate evaluations; trace_modes[i] selects the
    a-equation for row i.
    """
    Y = Y0.copy()
    m = Y.shape[0]
    k1 = np.empty(6, dtype=np.complex128)
    k2 = np.empty(6, dtype=np.complex128)
    k3 = np.empty(6, dtype=np.complex128)
    k4 = np.empty(6, dtype=np.complex128)
    tmp = np.empty(6, dtype=np.complex128)
    c0 = np.empty(3)
    cm = np.empty(3)
    c1 = np.empty(3)
    _coeffs(t0, J, lam, gam, c0)
    for n in range(nsteps):
        t = t0 + n * h
        _coeffs(t + 0.5 * h, J, lam, gam, cm)
        _coeffs(t0 + (n + 1) * h, J, lam, gam, c1)
        for r in range(m):
            y = Y[r]
            tm = trace_modes[r]
            _reduced_rhs(y, c0, J, tm, k1)
            for i in range(6):
                tmp[i] = y[i] + 0.5 * h * k1[i]
            _reduced_rhs(tmp, cm, J, tm, k2)
            for i in range(6):
                tmp[i] = y[i] + 0.5 * h * k2[i]
            _reduced_rhs(tmp, cm, J, tm, k3)
            for i in range(6):
                tmp[i] = y[i] + h * k3[i]
            _reduced_rhs(tmp, c1, J, tm, k4)
            for i in range(6):
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        c0[:] = c1
    return Y


@njit(cache=True)
def _generator(t, L0, A, B, mus, pref, out):
    out[:, :] = L0
    for k in range(mus.shape[0]):
        lam = mus[k].real
        dl = mus[k].imag
        lam_t = lam * t
        # 1 - exp(-(lam + i dl) t), computed without cancellation
        one_minus = _omdc(lam_t, dl * t) + 1j * math.exp(-lam_t) * math.sin(dl * t)
        f = pref * one_minus / mus[k]
        fc = f.conjugate()
        out += f * A[k] + fc * B[k]


@njit(cache=True)
def rk4_linear(v0, t0, h, nsteps, L0, A, B, mus, pref):
    """RK4 for dv/dt = L(t) v, L(t) = L0 + sum_k f_k(t) A_k + conj(f_k(t)) B_k,
    with f_k(t) = pref (1 - exp(-mu_k t)) / mu_k."""
    v = v0.copy()
    m = v.shape[0]
    L = np.empty((m, m), dtype=np.complex128)
    for n in range(nsteps):
        t = t0 + n * h
        _generator(t, L0, A, B, mus, pref, L)
        k1 = L @ v
        _generator(t + 0.5 * h, L0, A, B, mus, pref, L)
        k2 = L @ (v + 0.5 * h * k1)
        k3 = L @ (v + 0.5 * h * k2)
        _generator(t + h, L0, A, B, mus, pref, L)
        k4 = L @ (v + h * k3)
        v = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v
