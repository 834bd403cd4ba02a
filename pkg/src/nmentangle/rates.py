"""Decay rates and accumulated exponents for the Lorentzian bath.

The bath correlation is Phi(s) = (gamma_M lam / 2) exp(-lam |s|). Every
closed form below is evaluated with exp(-lam t); the instantaneous rates
eta and sigma are twice the time derivatives of gamma_minus and gamma_plus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .states import ModelParams


def _as_time(t, name: str = "t") -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)):
        raise ValueError(f"{name} must be finite")
    if np.any(t < 0):
        raise ValueError(f"{name} must be >= 0")
    return t


def _scalarize(x):
    return float(x) if np.ndim(x) == 0 else x


def one_minus_damped_cos(x, y):
    """1 - exp(-x) cos(y) without cancellation for small x and y."""
    return -np.expm1(-x) + 2.0 * np.exp(-x) * np.sin(0.5 * y) ** 2


def _bracket(lam, w, t):
    # lam (1 - e^{-lam t} cos wt) + w e^{-lam t} sin wt
    return lam * one_minus_damped_cos(lam * t, w * t) + w * np.exp(-lam * t) * np.sin(w * t)


def _accumulated(gamma, lam, w, t):
    """(1/2) * integral_0^t gamma lam / (lam^2 + w^2) * bracket(lam, w, z) dz."""
    n = lam * lam + w * w
    return gamma * lam / (2.0 * n) * (
        lam * t
        - (lam * lam - w * w) / n * one_minus_damped_cos(lam * t, w * t)
        - 2.0 * lam * w / n * np.exp(-lam * t) * np.sin(w * t)
    )


def _printed_shift(gamma, lam, w, t):
    n = lam * lam + w * w
    return gamma * lam / (2.0 * n) * (
        w * t
        + 2.0 * w / n * one_minus_damped_cos(lam * t, w * t)
        + (lam * lam - w * w) / n * np.exp(-lam * t) * np.sin(w * t)
    )


def _printed_shift_rate(gamma, lam, w, t):
    n = lam * lam + w * w
    x = np.exp(-lam * t)
    c, s = np.cos(w * t), np.sin(w * t)
    return gamma * lam / (2.0 * n) * (
        w
        + 2.0 * w / n * (lam * x * c + w * x * s)
        + (lam * lam - w * w) / n * (w * x * c - lam * x * s)
    )


def _kernel_shift(gamma, lam, w, t):
    n = lam * lam + w * w
    return gamma * lam / (2.0 * n) * (
        w * t
        - 2.0 * lam * w / n * one_minus_damped_cos(lam * t, w * t)
        + (lam * lam - w * w) / n * np.exp(-lam * t) * np.sin(w * t)
    )


@dataclass(frozen=True)
class RateBundle:
    """Rates and accumulated exponents at one time point (or a time array).

    eta, sigma are instantaneous rates; gamma_* and s_* are dimensionless
    accumulated quantities; gamma_total = gamma_plus + gamma_minus,
    s1 = s_plus + s_minus and s2 = 2 J t + s1.
    """

    t: np.ndarray | float
    eta: np.ndarray | float
    sigma: np.ndarray | float
    gamma_minus: np.ndarray | float
    gamma_plus: np.ndarray | float
    s_minus: np.ndarray | float
    s_plus: np.ndarray | float
    gamma_total: np.ndarray | float
    s1: np.ndarray | float
    s2: np.ndarray | float


def memory_rates(t, p: ModelParams):
    """Instantaneous decay rates (eta, sigma) at time t >= 0."""
    t = _as_time(t)
    eta = p.gamma_M * p.lam / (p.lam**2 + p.J**2) * _bracket(p.lam, p.J, t)
    sigma = p.gamma_M * p.lam / (p.lam**2 + 9 * p.J**2) * _bracket(p.lam, 3 * p.J, t)
    return _scalarize(eta), _scalarize(sigma)


def gamma_phase(t, p: ModelParams) -> RateBundle:
    """Evaluate every rate, decay exponent and phase at t (scalar or array)."""
    t = _as_time(t)
    eta, sigma = memory_rates(t, p)
    gm = _accumulated(p.gamma_M, p.lam, p.J, t)
    gp = _accumulated(p.gamma_M, p.lam, 3 * p.J, t)
    sm = _printed_shift(p.gamma_M, p.lam, p.J, t)
    sp = _printed_shift(p.gamma_M, p.lam, 3 * p.J, t)
    s1 = sp + sm
    f = _scalarize
    return RateBundle(
        t=f(t),
        eta=eta,
        sigma=sigma,
        gamma_minus=f(gm),
        gamma_plus=f(gp),
        s_minus=f(sm),
        s_plus=f(sp),
        gamma_total=f(gm + gp),
        s1=f(s1),
        s2=f(2 * p.J * t + s1),
    )


def phase_rates(t, p: ModelParams):
    """Time derivatives (dS-/dt, dS+/dt) of the phase functions in RateBundle."""
    t = _as_time(t)
    return (
        _scalarize(_printed_shift_rate(p.gamma_M, p.lam, p.J, t)),
        _scalarize(_printed_shift_rate(p.gamma_M, p.lam, 3 * p.J, t)),
    )


def kernel_phases(t, p: ModelParams):
    """Frequency-shift phases (S-, S+) obtained by integrating the imaginary
    part of the Lorentzian memory integral directly.

    Diagnostic only: these are what the full master equation produces, and
    they differ from the phase functions used by RateBundle in the middle
    term. The master equation gives c ~ exp(-i(S+ + S-)) and
    h ~ exp(-i(2Jt + S+ - S-)).
    """
    t = _as_time(t)
    return (
        _scalarize(_kernel_shift(p.gamma_M, p.lam, p.J, t)),
        _scalarize(_kernel_shift(p.gamma_M, p.lam, 3 * p.J, t)),
    )


def _check_QR(Q, R):
    if not (np.isfinite(Q) and np.isfinite(R)):
        raise ValueError("Q and R must be finite")
    if Q < 0:
        raise ValueError("Q must be >= 0")
    if R <= 0:
        raise ValueError("R must be > 0")


def _dimless_branch(tau, q, R):
    n = 1.0 + q * q
    return (
        tau / (2.0 * n)
        - (1.0 - q * q) * one_minus_damped_cos(R * tau, q * R * tau) / (2.0 * R * n * n)
        - q * np.exp(-R * tau) * np.sin(q * R * tau) / (R * n * n)
    )


def gamma_dimless(tau, Q: float, R: float):
    """(gamma_minus, gamma_plus) as functions of tau = gamma_M t, Q and R."""
    tau = _as_time(tau, "tau")
    _check_QR(Q, R)
    return _scalarize(_dimless_branch(tau, Q, R)), _scalarize(_dimless_branch(tau, 3 * Q, R))


LARGE_Q_MIN = 5.0


def gamma_approx(tau_prime, Q: float, R: float):
    """Large-Q approximation of (gamma_minus, gamma_plus) in rescaled time tau'.

    Warns below Q = 5, where the dropped terms are no longer small.
    """
    tau_prime = _as_time(tau_prime, "tau_prime")
    _check_QR(Q, R)
    if Q <= 0:
        raise ValueError("rescaled time requires Q > 0")
    if Q < LARGE_Q_MIN:
        warnings.warn(f"gamma_approx is a large-Q form; Q={Q} < {LARGE_Q_MIN}", stacklevel=2)
    rq2 = R * Q * Q
    x = rq2 * tau_prime
    gm = 0.5 * (tau_prime + one_minus_damped_cos(x, R * Q**3 * tau_prime) / rq2)
    gp = (tau_prime + one_minus_damped_cos(x, 3 * R * Q**3 * tau_prime) / rq2) / 18.0
    return _scalarize(gm), _scalarize(gp)
