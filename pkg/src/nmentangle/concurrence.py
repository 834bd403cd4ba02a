"""Concurrence: Wootters' general formula, the X-state formula, the closed
pure-state decay formula, and the single-excitation comparator G(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rates import gamma_dimless
from .states import (
    SIGMA_Y,
    EigenbasisState,
    XStateStandard,
    check_density_matrix,
    standard_from_eigen,
    validate_xstate,
    xstate_violation,
)

_YY = np.kron(SIGMA_Y, SIGMA_Y)
EIG_CLAMP = 1e-10


@dataclass(frozen=True)
class ConcurrenceValue:
    value: float
    competitors: tuple[float, ...]

    def __float__(self):
        return self.value


def hermitian_eigvalsh(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of the Hermitian part of a 4x4 matrix."""
    m = np.asarray(m, dtype=complex)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def wootters(rho: np.ndarray, tol: float = 1e-8) -> ConcurrenceValue:
    """Wootters concurrence max(0, s1 - s2 - s3 - s4).

    The s_i are square roots of the eigenvalues of rho (Y rho* Y), obtained
    as singular values of sqrt(rho) Y conj(sqrt(rho)); this is the Hermitian
    form sqrt(rho) rho~ sqrt(rho) and stays accurate for degenerate spectra.
    """
    rho = np.asarray(rho, dtype=complex)
    check_density_matrix(rho, tol)
    sq = _psd_sqrt(rho)
    r = np.linalg.svd(sq @ _YY @ sq.conj(), compute_uv=False) ** 2
    r = np.where((r < 0) & (r > -EIG_CLAMP), 0.0, r)
    s = np.sort(np.sqrt(np.clip(r, 0.0, None)))[::-1]
    comp = float(s[0] - s[1] - s[2] - s[3])
    return ConcurrenceValue(value=min(max(0.0, comp), 1.0), competitors=(comp,))


def concurrence_x(s: XStateStandard, tol: float = 1e-12) -> ConcurrenceValue:
    """2 max(0, |w| - sqrt(x1 x2), |y| - sqrt(u v))."""
    validate_xstate(s, tol)
    c1 = abs(s.w) - math.sqrt(max(s.x1, 0.0) * max(s.x2, 0.0))
    c2 = abs(s.y) - math.sqrt(max(s.u, 0.0) * max(s.v, 0.0))
    return ConcurrenceValue(value=min(2.0 * max(0.0, c1, c2), 1.0), competitors=(2.0 * c1, 2.0 * c2))


def figure_concurrence(tau, Q: float, R: float, theta: float):
    """Closed pure-state decay formula for cos(theta/2)|01> + sin(theta/2)|10>:

        C = | (1 + C0)/2 exp(-gamma_minus) - (1 - C0)/2 exp(-gamma_plus) |

    with C0 = sin(theta), clamped to [0, 1].
    """
    if not 0.0 <= theta <= 2.0 * math.pi:
        raise ValueError("theta must lie in [0, 2*pi]")
    gm, gp = gamma_dimless(tau, Q, R)
    c0 = math.sin(theta)
    val = np.abs(0.5 * (1 + c0) * np.exp(-np.asarray(gm)) - 0.5 * (1 - c0) * np.exp(-np.asarray(gp)))
    val = np.clip(val, 0.0, 1.0)
    return float(val) if np.ndim(val) == 0 else val


def exact_concurrence(traj, tol: float = 1e-8) -> np.ndarray:
    """X-state concurrence of every sample of an eigenbasis trajectory.

    Populations are checked for positivity only (to ``tol``); trace is not
    enforced, so paper-literal trajectories with a(0) > 0 are accepted.
    """
    out = np.empty(len(traj))
    for i in range(len(traj)):
        E: EigenbasisState = traj.state(i)
        s = standard_from_eigen(E, check=False)
        msg = xstate_violation(s, tol, check_trace=False)
        if msg is not None:
            raise ValueError(f"sample {i} (t={traj.times[i]:g}): {msg}")
        c1 = abs(s.w) - math.sqrt(max(s.x1, 0.0) * max(s.x2, 0.0))
        c2 = abs(s.y) - math.sqrt(max(s.u, 0.0) * max(s.v, 0.0))
        out[i] = min(2.0 * max(0.0, c1, c2), 1.0)
    return out


@dataclass(frozen=True)
class ComparatorParams:
    gamma_M: float
    lam: float

    def __post_init__(self):
        if self.gamma_M <= 0 or self.lam <= 0:
            raise ValueError("gamma_M and lam must be > 0")

    @property
    def delta(self) -> complex:
        """sqrt(1 - 2 gamma_M / lam); imaginary when 2 gamma_M > lam."""
        return complex(np.sqrt(complex(1.0 - 2.0 * self.gamma_M / self.lam)))


def comparator_G(t, cp: ComparatorParams):
    """G(t) = exp(-lam t/2) [cosh(lam t delta/2) + sinh(lam t delta/2)/delta].

    Evaluated as exponentials referred to exp(-lam t/2) so large lam t does
    not overflow; delta = 0 uses the limit exp(-lam t/2)(1 + lam t/2).
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    x = 0.5 * cp.lam * t
    d = cp.delta
    if d == 0:
        g = np.exp(-x) * (1.0 + x)
    else:
        z = x * d
        cosh_part = 0.5 * (np.exp(z - x) + np.exp(-z - x))
        small = np.abs(z) < 1e-3
        z_safe = np.where(small, 1.0, z)
        sinhc = np.where(
            small,
            np.exp(-x) * (1.0 + z * z / 6.0 + z**4 / 120.0),
            0.5 * (np.exp(z - x) - np.exp(-z - x)) / z_safe,
        )
        g = cosh_part + x * sinhc
    g = np.real(g)
    return float(g) if g.ndim == 0 else g


def comparator_concurrence(t, c0: float, cp: ComparatorParams):
    val = np.maximum(0.0, c0 * np.asarray(comparator_G(t, cp)))
    return float(val) if np.ndim(val) == 0 else val
