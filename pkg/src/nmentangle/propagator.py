"""Time evolution of eigenbasis X-state coefficients.

Two readings of the population equations are supported (see EvolutionMode).
``evolve_eigen`` uses closed forms plus integrating-factor quadrature;
``evolve_reduced_numeric`` integrates the same right-hand sides with a
fixed-step RK4 and exists to cross-check it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .rates import gamma_phase, memory_rates
from .states import (
    STATE_TOL,
    EigenbasisState,
    InvalidStateError,
    ModelParams,
    eigen_violation,
)

QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-11, limit=400)
NUMERIC_STEP_FRACTION = 1e-3


class EvolutionMode(str, enum.Enum):
    """How the psi1 population decays.

    PAPER_LITERAL: a(t) = a(0) exp(-Gamma(t)), as printed; populations then
    gain trace whenever a(0) > 0.
    TRACE_CONSERVING: da/dt = -(eta + sigma) a, i.e. a(0) exp(-2 Gamma(t)),
    which balances the gains of b and e.
    """

    PAPER_LITERAL = "paper-literal"
    TRACE_CONSERVING = "trace-conserving"


class StepSizeError(ValueError):
    pass


@dataclass
class Trajectory:
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    e: np.ndarray
    d: np.ndarray
    c: np.ndarray
    h: np.ndarray
    mode: EvolutionMode
    params: ModelParams
    # d(t) from direct quadrature of the d-gain equation, when requested
    d_quadrature: np.ndarray | None = field(default=None)

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> EigenbasisState:
        return EigenbasisState(
            a=float(self.a[i]),
            b=float(self.b[i]),
            e=float(self.e[i]),
            d=float(self.d[i]),
            c=complex(self.c[i]),
            h=complex(self.h[i]),
        )

    @property
    def states(self) -> list[EigenbasisState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def trace(self) -> np.ndarray:
        return self.a + self.b + self.e + self.d

    def as_array(self) -> np.ndarray:
        """(n, 6) complex array with columns a, b, e, d, c, h."""
        return np.column_stack([self.a, self.b, self.e, self.d, self.c, self.h]).astype(complex)

    def check(self, tol: float = 1e-8) -> None:
        """Raise InvalidStateError if the trajectory invariants fail."""
        if self.mode is EvolutionMode.TRACE_CONSERVING:
            resid = float(np.abs(self.trace - 1.0).max())
            if resid > tol:
                raise InvalidStateError(f"trace residual {resid:.3e} exceeds {tol:g}")
        for name in ("b", "e", "d"):
            arr = getattr(self, name)
            if arr.min() < -tol or arr.max() > 1 + tol:
                raise InvalidStateError(f"{name} leaves [0, 1] by more than {tol:g}")


def _check_grid(grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("time grid must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(grid)):
        raise ValueError("time grid must be finite")
    if grid[0] < 0:
        raise ValueError("time grid must be nonnegative")
    if np.any(np.diff(grid) < 0):
        raise ValueError("time grid must be ascending")
    return grid


def _check_initial(E0: EigenbasisState, tol: float) -> None:
    msg = eigen_violation(E0, tol)
    if msg is not None:
        raise InvalidStateError(f"initial state: {msg}")


def _a_exponent_factor(mode: EvolutionMode) -> float:
    return 2.0 if mode is EvolutionMode.TRACE_CONSERVING else 1.0


def _pieces(t0: float, t1: float, p: ModelParams) -> np.ndarray:
    width = 20.0 * p.fastest_timescale
    n = min(max(1, math.ceil((t1 - t0) / width)), 2000)
    return np.linspace(t0, t1, n + 1)


def _fed_population(a0, rate_index, grid, p, mode, g_grid) -> np.ndarray:
    """Integrating-factor solution of dx/dt = -r x + r a, r = eta or sigma,
    for the a-fed part only (x(0) = 0). Accumulated interval by interval with
    the exponential factor referred to the interval end, so nothing overflows.
    """
    k = _a_exponent_factor(mode)

    def integrand(z, g_ref):
        rb = gamma_phase(z, p)
        r = (rb.eta, rb.sigma)[rate_index]
        g = (rb.gamma_minus, rb.gamma_plus)[rate_index]
        return r * a0 * math.exp(-k * rb.gamma_total + 2.0 * (g - g_ref))

    out = np.zeros_like(grid)
    t_prev, g_prev, x = 0.0, 0.0, 0.0
    for i, t in enumerate(grid):
        if t > t_prev:
            g_t = float(g_grid[i])
            edges = _pieces(t_prev, t, p)
            acc = sum(
                quad(integrand, lo, hi, args=(g_t,), **QUAD_OPTS)[0]
                for lo, hi in zip(edges[:-1], edges[1:])
            )
            x = x * math.exp(-2.0 * (g_t - g_prev)) + acc
            t_prev, g_prev = t, g_t
        out[i] = x
    return out


def _population_at(z: float, x0: float, a0: float, rate_index: int, p: ModelParams, mode) -> float:
    """b(z) or e(z) at a single time, by direct quadrature (diagnostic path)."""
    rb = gamma_phase(z, p)
    gz = (rb.gamma_minus, rb.gamma_plus)[rate_index]
    val = x0 * math.exp(-2.0 * gz)
    if a0 == 0.0 or z == 0.0:
        return val
    k = _a_exponent_factor(mode)

    def integrand(s):
        rs = gamma_phase(s, p)
        r = (rs.eta, rs.sigma)[rate_index]
        g = (rs.gamma_minus, rs.gamma_plus)[rate_index]
        return r * a0 * math.exp(-k * rs.gamma_total + 2.0 * (g - gz))

    return val + quad(integrand, 0.0, z, **QUAD_OPTS)[0]


def d_gain_quadrature(E0: EigenbasisState, p: ModelParams, grid, mode: EvolutionMode) -> np.ndarray:
    """d(t) = d(0) + int_0^t [eta b + sigma e] dz evaluated by nested quadrature."""
    grid = _check_grid(grid)

    def integrand(z):
        eta, sigma = memory_rates(z, p)
        b = _population_at(z, E0.b, E0.a, 0, p, mode)
        e = _population_at(z, E0.e, E0.a, 1, p, mode)
        return eta * b + sigma * e

    out = np.empty_like(grid)
    prev_t, acc = 0.0, 0.0
    for i, t in enumerate(grid):
        if t > prev_t:
            edges = _pieces(prev_t, t, p)
            for lo, hi in zip(edges[:-1], edges[1:]):
                acc += quad(integrand, lo, hi, epsabs=1e-11, epsrel=1e-10, limit=200)[0]
            prev_t = t
        out[i] = E0.d + acc
    return out


def evolve_eigen(
    E0: EigenbasisState,
    p: ModelParams,
    grid,
    mode: EvolutionMode | str = EvolutionMode.TRACE_CONSERVING,
    *,
    tol: float = STATE_TOL,
    d_quadrature: bool = False,
) -> Trajectory:
    """Closed-form / quadrature evolution of E0 sampled at the grid times.

    Coherences: c(t) = c0 exp(-i S1 - Gamma), h(t) = h0 exp(-i S2 - Gamma).
    Populations b and e follow the integrating-factor solutions; a depends on
    ``mode``. In trace-conserving mode d = tr - a - b - e; in paper-literal
    mode d is the integral of eta b + sigma e, which equals
    d0 + (b0 - b) + (e0 - e) + 2 a0 (1 - exp(-Gamma)) exactly because
    eta + sigma = 2 dGamma/dt.

    With ``d_quadrature=True`` the d-gain integral is additionally evaluated
    by nested quadrature and stored on the trajectory.
    """
    mode = EvolutionMode(mode)
    grid = _check_grid(grid)
    _check_initial(E0, tol)
    rb = gamma_phase(grid, p)
    gm = np.atleast_1d(rb.gamma_minus)
    gp = np.atleast_1d(rb.gamma_plus)
    gt = gm + gp
    s1 = np.atleast_1d(rb.s1)
    s2 = np.atleast_1d(rb.s2)

    c = E0.c * np.exp(-1j * s1 - gt)
    h = E0.h * np.exp(-1j * s2 - gt)
    a = E0.a * np.exp(-_a_exponent_factor(mode) * gt)
    b = E0.b * np.exp(-2.0 * gm)
    e = E0.e * np.exp(-2.0 * gp)
    if E0.a != 0.0:
        b = b + _fed_population(E0.a, 0, grid, p, mode, gm)
        e = e + _fed_population(E0.a, 1, grid, p, mode, gp)
    if mode is EvolutionMode.TRACE_CONSERVING:
        d = E0.trace - a - b - e
    else:
        d = E0.d + (E0.b - b) + (E0.e - e) + 2.0 * E0.a * (1.0 - np.exp(-gt))

    # states at t = 0 are reported exactly
    at0 = grid == 0.0
    a[at0], b[at0], e[at0], d[at0] = E0.a, E0.b, E0.e, E0.d
    c[at0], h[at0] = E0.c, E0.h

    traj = Trajectory(times=grid, a=a, b=b, e=e, d=d, c=c, h=h, mode=mode, params=p)
    if d_quadrature:
        traj.d_quadrature = d_gain_quadrature(E0, p, grid, mode)
    return traj


def _shift_rate_bound(gamma: float, lam: float, w: float) -> float:
    # uses lam e^{-lam t} |sin wt| <= w / e, so the bound vanishes with w
    n = lam * lam + w * w
    return gamma * lam * w / (2.0 * n) * (1.0 + (2.0 * (lam + w) + abs(lam * lam - w * w) * (1.0 + math.exp(-1.0))) / n)


def max_numeric_step(p: ModelParams) -> float:
    """Largest RK4 step accepted: a fixed fraction of the fastest timescale.

    Besides 1/lam, 1/(3J) and 1/gamma_M, the rotation rate of h (2J plus the
    shift rates) is included; for lam, J << gamma_M it can dominate.
    """
    rot = 2.0 * p.J + _shift_rate_bound(p.gamma_M, p.lam, p.J) + _shift_rate_bound(p.gamma_M, p.lam, 3.0 * p.J)
    scale = p.fastest_timescale if rot == 0 else min(p.fastest_timescale, 1.0 / rot)
    return NUMERIC_STEP_FRACTION * scale


def _initial_row(E0: EigenbasisState) -> np.ndarray:
    return np.array([E0.a, E0.b, E0.e, E0.d, E0.c, E0.h], dtype=np.complex128)


def evolve_reduced_numeric_many(
    initial: list[tuple[EigenbasisState, EvolutionMode | str]],
    p: ModelParams,
    grid,
    step: float | None = None,
    *,
    tol: float = STATE_TOL,
) -> list[Trajectory]:
    """RK4 integration of several (state, mode) pairs sharing one parameter set."""
    grid = _check_grid(grid)
    hmax = max_numeric_step(p)
    if step is None:
        step = hmax
    if not step > 0:
        raise StepSizeError("step must be positive")
    if step > hmax * (1 + 1e-12):
        raise StepSizeError(
            f"step {step:.3g} exceeds {NUMERIC_STEP_FRACTION:g} x fastest timescale ({hmax:.3g})"
        )
    modes = [EvolutionMode(m) for _, m in initial]
    for E0, _ in initial:
        _check_initial(E0, tol)
    Y = np.array([_initial_row(E0) for E0, _ in initial])
    trace_modes = np.array([m is EvolutionMode.TRACE_CONSERVING for m in modes])
    out = np.empty((len(initial), grid.size, 6), dtype=np.complex128)
    t = 0.0
    for i, t_next in enumerate(grid):
        if t_next > t:
            n = math.ceil((t_next - t) / step * (1 - 1e-12))
            Y = _kernels.rk4_reduced(Y, trace_modes, t, (t_next - t) / n, n, p.J, p.lam, p.gamma_M)
            t = t_next
        out[:, i, :] = Y
    trajs = []
    for k, mode in enumerate(modes):
        cols = out[k]
        trajs.append(
            Trajectory(
                times=grid.copy(),
                a=cols[:, 0].real.copy(),
                b=cols[:, 1].real.copy(),
                e=cols[:, 2].real.copy(),
                d=cols[:, 3].real.copy(),
                c=cols[:, 4].copy(),
                h=cols[:, 5].copy(),
                mode=mode,
                params=p,
            )
        )
    return trajs


def evolve_reduced_numeric(
    E0: EigenbasisState,
    p: ModelParams,
    grid,
    mode: EvolutionMode | str = EvolutionMode.TRACE_CONSERVING,
    step: float | None = None,
    *,
    tol: float = STATE_TOL,
) -> Trajectory:
    """Fixed-step RK4 of the reduced parameter equations.

    The default (and largest accepted) step is ``max_numeric_step(p)``;
    larger steps raise StepSizeError.
    """
    return evolve_reduced_numeric_many([(E0, mode)], p, grid, step, tol=tol)[0]


def max_deviation(t1: Trajectory, t2: Trajectory) -> dict[str, float]:
    """Largest absolute difference per coefficient between two trajectories."""
    if not np.array_equal(t1.times, t2.times):
        raise ValueError("trajectories sampled on different grids")
    return {
        name: float(np.abs(getattr(t1, name) - getattr(t2, name)).max())
        for name in ("a", "b", "e", "d", "c", "h")
    }
