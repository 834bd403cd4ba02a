"""Regime labels, oscillation metrics and the parameter-sweep engine."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .concurrence import exact_concurrence, figure_concurrence
from .propagator import EvolutionMode, evolve_eigen
from .states import ModelParams, eigen_from_standard, make_pure_xstate, tau_from_tau_prime

MODES = ("figure", "exact-paper", "exact-trace")
TIME_AXES = ("tau", "tau-prime")

_EXACT_MODES = {
    "exact-paper": EvolutionMode.PAPER_LITERAL,
    "exact-trace": EvolutionMode.TRACE_CONSERVING,
}


@dataclass(frozen=True)
class RegimeThresholds:
    markovian_min_R: float = 10.0
    markovian_max_Q: float = 1.0
    nonmarkovian_max_R: float = 1.0
    nonmarkovian_min_Q: float = 5.0

    def describe(self) -> str:
        return (
            f"markovian: R>={self.markovian_min_R:g} and Q<={self.markovian_max_Q:g}; "
            f"non-markovian: R<={self.nonmarkovian_max_R:g} and Q>={self.nonmarkovian_min_Q:g}"
        )


@dataclass(frozen=True)
class RegimeLabel:
    label: str
    thresholds: RegimeThresholds

    def __str__(self):
        return self.label


def classify_regime(Q: float, R: float, thresholds: RegimeThresholds = RegimeThresholds()) -> RegimeLabel:
    if R >= thresholds.markovian_min_R and Q <= thresholds.markovian_max_Q:
        label = "markovian"
    elif R <= thresholds.nonmarkovian_max_R and Q >= thresholds.nonmarkovian_min_Q:
        label = "non-markovian"
    else:
        label = "intermediate"
    return RegimeLabel(label, thresholds)


@dataclass(frozen=True)
class OscillationMetrics:
    extrema: int
    extrema_after_transient: int
    strength: float


NOISE_FLOOR = 1e-6
MIN_SAMPLES = 16


def _count_extrema(diffs: np.ndarray, floor: float) -> np.ndarray:
    """Indices (into diffs) where the slope changes sign, ignoring flat steps."""
    keep = np.flatnonzero(np.abs(diffs) > floor)
    signs = np.sign(diffs[keep])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return keep[flips + 1]


def oscillation_metrics(
    series,
    times=None,
    *,
    transient: float = 0.1,
    floor: float = NOISE_FLOOR,
) -> OscillationMetrics:
    """Count interior extrema and measure the late-time swing of a series.

    An extremum is a sign change of the first difference; steps smaller than
    ``floor`` are ignored. The transient window is the first ``transient``
    fraction of the time span; ``strength`` is max - min after it.
    """
    y = np.asarray(series, dtype=float)
    if y.ndim != 1 or y.size < MIN_SAMPLES:
        raise ValueError(f"series needs at least {MIN_SAMPLES} samples")
    t = np.arange(y.size, dtype=float) if times is None else np.asarray(times, dtype=float)
    if t.shape != y.shape:
        raise ValueError("times and series differ in length")
    idx = _count_extrema(np.diff(y), floor)
    t_cut = t[0] + transient * (t[-1] - t[0])
    late = t >= t_cut
    return OscillationMetrics(
        extrema=int(idx.size),
        extrema_after_transient=int(np.count_nonzero(t[idx] >= t_cut)),
        strength=float(y[late].max() - y[late].min()),
    )


@dataclass(frozen=True)
class SweepSpec:
    Q_values: tuple[float, ...]
    R_values: tuple[float, ...]
    times: tuple[float, ...]
    theta: float = math.pi / 2
    mode: str = "figure"
    time_axis: str = "tau"
    gamma_M: float = 1.0  # physical scale for exact modes; figure mode is scale-free
    thresholds: RegimeThresholds = field(default_factory=RegimeThresholds)
    workers: int = 1


@dataclass(frozen=True)
class SweepRecord:
    time: float
    time_axis: str
    Q: float
    R: float
    theta: float
    mode: str
    concurrence: float
    regime: str
    oscillations: int


def _finite_all(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def validate_sweep(spec: SweepSpec) -> None:
    Qs = _finite_all(spec.Q_values, "Q_values")
    Rs = _finite_all(spec.R_values, "R_values")
    ts = _finite_all(spec.times, "times")
    if np.any(Qs < 0):
        raise ValueError("Q must be >= 0")
    if np.any(Rs <= 0):
        raise ValueError("R must be > 0")
    if np.any(ts < 0) or np.any(np.diff(ts) < 0):
        raise ValueError("times must be nonnegative and ascending")
    if spec.mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if spec.time_axis not in TIME_AXES:
        raise ValueError(f"time_axis must be one of {TIME_AXES}")
    if spec.time_axis == "tau-prime" and np.any(Qs <= 0):
        raise ValueError("tau-prime axis requires Q > 0")
    if not (math.isfinite(spec.theta) and 0 <= spec.theta <= 2 * math.pi):
        raise ValueError("theta must lie in [0, 2*pi]")
    if not spec.gamma_M > 0:
        raise ValueError("gamma_M must be > 0")


def concurrence_series(Q: float, R: float, times, spec: SweepSpec) -> np.ndarray:
    """Concurrence of the pure state at theta for one (Q, R) point."""
    times = np.asarray(times, dtype=float)
    tau = tau_from_tau_prime(times, Q) if spec.time_axis == "tau-prime" else times
    if spec.mode == "figure":
        return np.atleast_1d(figure_concurrence(tau, Q, R, spec.theta))
    p = ModelParams.from_dimensionless(Q, R, spec.gamma_M)
    E0 = eigen_from_standard(make_pure_xstate(spec.theta))
    traj = evolve_eigen(E0, p, tau / spec.gamma_M, _EXACT_MODES[spec.mode])
    return exact_concurrence(traj)


def _evaluate_point(args):
    Q, R, spec = args
    conc = concurrence_series(Q, R, spec.times, spec)
    osc = oscillation_metrics(conc, spec.times).extrema if conc.size >= MIN_SAMPLES else 0
    regime = classify_regime(Q, R, spec.thresholds).label
    return [
        SweepRecord(
            time=float(t),
            time_axis=spec.time_axis,
            Q=float(Q),
            R=float(R),
            theta=float(spec.theta),
            mode=spec.mode,
            concurrence=float(c),
            regime=regime,
            oscillations=osc,
        )
        for t, c in zip(spec.times, conc)
    ]


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Evaluate the Q x R grid; records are Q-major, then R, then time.

    Points may run on several threads (``spec.workers``); output order does
    not depend on it.
    """
    validate_sweep(spec)
    points = [(float(Q), float(R), spec) for Q in spec.Q_values for R in spec.R_values]
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(_evaluate_point, points))
    else:
        chunks = [_evaluate_point(pt) for pt in points]
    return [rec for chunk in chunks for rec in chunk]
