"""Cross-check suite behind ``nmentangle verify``.

Each check compares two independent routes (closed form vs quadrature,
closed form vs RK4, reduced equations vs the full master equation, ...)
and returns a CheckResult. The adjudication breakdown is always produced.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .concurrence import (
    ComparatorParams,
    comparator_G,
    concurrence_x,
    exact_concurrence,
    figure_concurrence,
    wootters,
)
from .oracle import integrate_master
from .propagator import EvolutionMode, evolve_eigen, evolve_reduced_numeric_many
from .rates import gamma_approx, gamma_dimless, gamma_phase, kernel_phases, memory_rates
from .regimes import oscillation_metrics
from .states import (
    EigenbasisState,
    ModelParams,
    XStateStandard,
    density_matrix,
    eigen_from_standard,
    make_pure_xstate,
    random_xstate,
    tau_from_tau_prime,
)

ORACLE_POINTS = ((1.0, 1.0), (0.0, 100.0), (5.0, 0.04))


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    measured: str
    threshold: str
    details: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.key} {self.title}: {self.measured} (required {self.threshold})"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _oracle_states() -> dict[str, XStateStandard]:
    return {
        "theta=pi/2": make_pure_xstate(math.pi / 2),
        "theta=pi": make_pure_xstate(math.pi),
        "|00>": XStateStandard(1.0, 0.0, 0.0, 0.0),
        "Bell(00+11)": XStateStandard(0.5, 0.0, 0.0, 0.5, w=0.5),
        "mixed X": XStateStandard(0.3, 0.25, 0.15, 0.3, w=0.2 + 0.1j, y=0.1 - 0.05j),
    }


@_timed
def check_markovian_limit() -> CheckResult:
    t0 = time.perf_counter()
    tau = np.linspace(0.0, 5.0, 2001)
    C = figure_concurrence(tau, 0.0, 100.0, math.pi / 2)
    err = float(np.abs(C - np.exp(-tau / 2)).max())
    runtime = time.perf_counter() - t0
    return CheckResult(
        "C1",
        "Markovian limit (figure mode, Q=0, R=100)",
        err <= 6e-3 and runtime < 1.0,
        f"max|C - exp(-tau/2)| = {err:.3e}, runtime {runtime * 1e3:.1f} ms",
        "<= 6e-3, < 1 s",
    )


@_timed
def check_dimensionless_rates() -> CheckResult:
    tau = np.linspace(0.0, 10.0, 100)
    worst = 0.0
    for Q in (0.5, 1.0, 5.0):
        for R in (0.1, 1.0, 10.0):
            rb = gamma_phase(tau, ModelParams(J=Q * R, lam=R, gamma_M=1.0))
            gm, gp = gamma_dimless(tau, Q, R)
            worst = max(worst, float(np.abs(rb.gamma_minus - gm).max()), float(np.abs(rb.gamma_plus - gp).max()))
    return CheckResult(
        "C2",
        "dimensional vs dimensionless decay exponents",
        worst < 1e-10,
        f"max deviation {worst:.3e} on 9 (Q,R) x 100 times",
        "< 1e-10",
    )


@_timed
def check_rate_quadrature() -> CheckResult:
    worst = 0.0
    params = [ModelParams(J, lam, 1.0) for J, lam in ((0.0, 1.0), (1.0, 1.0), (0.5, 0.1), (10.0, 1.0), (5.0, 50.0))]
    for p in params:
        ts = np.linspace(0.0, 6.0, 13)[1:]
        rb = gamma_phase(ts, p)
        prev, acc_m, acc_p = 0.0, 0.0, 0.0
        for i, t in enumerate(ts):
            acc_m += quad(lambda z: memory_rates(z, p)[0], prev, t, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
            acc_p += quad(lambda z: memory_rates(z, p)[1], prev, t, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
            prev = t
            worst = max(worst, abs(0.5 * acc_m - rb.gamma_minus[i]), abs(0.5 * acc_p - rb.gamma_plus[i]))
    return CheckResult(
        "C3",
        "closed-form exponents vs adaptive quadrature of the rates",
        worst < 1e-7,
        f"max error {worst:.3e}",
        "< 1e-7",
    )


@_timed
def check_reduced_cross() -> CheckResult:
    grid = np.linspace(0.0, 2.0, 11)
    thetas = (0.0, math.pi / 2, math.pi)
    worst, where = 0.0, ""
    for Q in (0.0, 1.0, 10.0):
        for R in (0.01, 1.0, 100.0):
            p = ModelParams.from_dimensionless(Q, R)
            init = [
                (eigen_from_standard(make_pure_xstate(th)), mode) for th in thetas for mode in EvolutionMode
            ]
            numeric = evolve_reduced_numeric_many(init, p, grid)
            for (E0, mode), num in zip(init, numeric):
                ana = evolve_eigen(E0, p, grid, mode)
                dev = max(float(np.abs(ana.as_array() - num.as_array()).max()), 0.0)
                if dev > worst:
                    worst, where = dev, f"Q={Q:g} R={R:g} {mode.value}"
    return CheckResult(
        "C4",
        "integrating-factor propagator vs fixed-step RK4",
        worst < 1e-8,
        f"max parameter deviation {worst:.3e} ({where})",
        "< 1e-8",
    )


def _oracle_runs(tau_max: float = 10.0, samples: int = 51):
    grid = np.linspace(0.0, tau_max, samples)
    runs = {}
    for Q, R in ORACLE_POINTS:
        p = ModelParams.from_dimensionless(Q, R)
        for name, s in _oracle_states().items():
            runs[(Q, R, name)] = (p, s, integrate_master(density_matrix(s), p, grid))
    return grid, runs


@_timed
def check_oracle_sanity(runs=None) -> CheckResult:
    if runs is None:
        _, runs = _oracle_runs()
    tr = max(m.trace_drift for _, _, m in runs.values())
    herm = max(m.hermiticity_drift for _, _, m in runs.values())
    leak = max(max(m.leakage, m.eigen_leakage()) for _, _, m in runs.values())
    details = []
    for (Q, R, name), (_, _, m) in runs.items():
        lo = float(m.min_eigenvalues.min())
        details.append(f"positivity Q={Q:g} R={R:g} {name}: min eigenvalue {lo:+.3e}")
    return CheckResult(
        "C5",
        "master-equation oracle invariants over tau in [0, 10]",
        tr < 1e-7 and herm < 1e-12 and leak < 1e-9,
        f"trace drift {tr:.2e}, Hermiticity drift {herm:.2e}, off-X leakage {leak:.2e}",
        "< 1e-7, < 1e-12, < 1e-9",
        details,
    )


def adjudication_breakdown(grid, runs) -> list[str]:
    """Per-coefficient max |oracle - reduced| for every oracle run and both modes,
    plus phase and closed-formula diagnostics."""
    lines = ["coefficient deviations max_t |oracle - reduced| (a b e d c h):"]
    for (Q, R, name), (p, s, m) in runs.items():
        E0 = eigen_from_standard(s)
        ora = m.eigen_states()
        ora_arr = np.array([[x.a, x.b, x.e, x.d, x.c, x.h] for x in ora], dtype=complex)
        for mode in EvolutionMode:
            red = evolve_eigen(E0, p, grid, mode).as_array()
            dev = np.abs(ora_arr - red).max(axis=0)
            cells = " ".join(f"{v:.1e}" for v in dev)
            lines.append(f"  Q={Q:g} R={R:g} {name:12s} {mode.value:16s} {cells}")
        # coherence phases against the kernel-derived shifts
        rb = gamma_phase(grid, p)
        km, kp = kernel_phases(grid, p)
        c_k = E0.c * np.exp(-1j * (km + kp) - rb.gamma_total)
        h_k = E0.h * np.exp(-1j * (2 * p.J * grid + kp - km) - rb.gamma_total)
        dc = float(np.abs(ora_arr[:, 4] - c_k).max())
        dh = float(np.abs(ora_arr[:, 5] - h_k).max())
        lines.append(f"  Q={Q:g} R={R:g} {name:12s} kernel-derived phases  c {dc:.1e}  h {dh:.1e}")
    lines.append("closed pure-state formula vs oracle concurrence (theta=pi/2):")
    for Q, R in ORACLE_POINTS:
        p, s, m = runs[(Q, R, "theta=pi/2")]
        C_ora = np.array([wootters(r, tol=1e-7).value for r in m.states])
        C_fig = figure_concurrence(grid * p.gamma_M, Q, R, math.pi / 2)
        gm, _ = gamma_dimless(grid * p.gamma_M, Q, R)
        d_fig = float(np.abs(C_ora - C_fig).max())
        d_two = float(np.abs(C_ora - np.exp(-2 * np.asarray(gm))).max())
        lines.append(
            f"  Q={Q:g} R={R:g}: |C_oracle - exp(-G-)| max {d_fig:.2e};  |C_oracle - exp(-2 G-)| max {d_two:.2e}"
        )
    return lines


@_timed
def check_adjudication(grid=None, runs=None) -> CheckResult:
    if runs is None:
        grid, runs = _oracle_runs()
    worst = 0.0
    for Q, R in ORACLE_POINTS:
        p, s, m = runs[(Q, R, "theta=pi/2")]
        b_ora = np.array([x.b for x in m.eigen_states()])
        rb = gamma_phase(grid, p)
        b_red = eigen_from_standard(s).b * np.exp(-2 * rb.gamma_minus)
        worst = max(worst, float(np.abs(b_ora / b_red - 1).max()))
    return CheckResult(
        "C6",
        "adjudication: oracle psi2 population vs b0 exp(-2 Gamma-)",
        worst < 1e-3,
        f"max relative deviation {worst:.3e}",
        "< 1e-3 relative",
        adjudication_breakdown(grid, runs),
    )


@_timed
def check_entanglement_generation() -> CheckResult:
    E0 = eigen_from_standard(make_pure_xstate(math.pi))
    tau = np.linspace(0.0, 20.0, 2001)
    peak_nm = float(exact_concurrence(evolve_eigen(E0, ModelParams.from_dimensionless(5.0, 0.04), tau)).max())
    peak_m = float(exact_concurrence(evolve_eigen(E0, ModelParams.from_dimensionless(0.0, 100.0), tau)).max())
    return CheckResult(
        "C7",
        "entanglement generation from |10> (exact mode)",
        peak_nm > 0.01 and peak_m < 1e-3,
        f"max C at Q=5,R=0.04: {peak_nm:.4f}; at Q=0,R=100: {peak_m:.2e}",
        "> 0.01 and < 1e-3",
    )


@_timed
def check_oscillation_criterion() -> CheckResult:
    tp = np.linspace(0.0, 20.0, 2001)
    strong = oscillation_metrics(figure_concurrence(tau_from_tau_prime(tp, 10.0), 10.0, 0.01, math.pi / 2), tp)
    weak = oscillation_metrics(figure_concurrence(tau_from_tau_prime(tp, 10.0), 10.0, 1.0, math.pi / 2), tp)
    return CheckResult(
        "C8",
        "oscillations strongest at R Q^2 ~ 1 (figure mode, Q=10)",
        strong.extrema >= 2 and weak.extrema_after_transient == 0,
        f"R=0.01: {strong.extrema} extrema; R=1: {weak.extrema_after_transient} after transient",
        ">= 2 and 0",
    )


@_timed
def check_rescaled_collapse() -> CheckResult:
    tp = np.linspace(0.0, 5.0, 1001)
    C = figure_concurrence(tau_from_tau_prime(tp, 10.0), 10.0, 1.0, math.pi / 2)
    err = float(np.abs(C - np.exp(-tp / 2)).max())
    return CheckResult(
        "C9a",
        "rescaled-time exponential collapse (Q=10, R=1)",
        err < 0.02,
        f"max|C(tau') - exp(-tau'/2)| = {err:.3e}",
        "< 0.02",
    )


@_timed
def check_large_q_approximation() -> CheckResult:
    Q, R, tp = 20.0, 1.0 / 400.0, 1.0
    gm, gp = gamma_dimless(Q * Q * tp, Q, R)
    am, ap = gamma_approx(tp, Q, R)
    rel_m = abs(am - gm) / gm
    rel_p = abs(ap - gp) / gp
    grid = np.linspace(0.05, 5.0, 100)
    gm_g, _ = gamma_dimless(Q * Q * grid, Q, R)
    am_g, _ = gamma_approx(grid, Q, R)
    rel_grid = np.abs(am_g - gm_g) / gm_g
    details = [
        f"tau'=1: gamma_minus exact {gm:.6f} approx {am:.6f}; gamma_plus exact {gp:.6f} approx {ap:.6f} "
        f"(rel {rel_p:.2e})",
        f"gamma_minus relative error over tau' in [0.05, 5]: max {rel_grid.max():.2e}, "
        f"at tau'=5 {rel_grid[-1]:.2e}",
        "the dropped sine term is of relative size ~2/Q in the oscillatory part",
    ]
    return CheckResult(
        "C9b",
        "large-Q approximation vs exact (Q=20, RQ^2=1, tau'=1)",
        rel_m < 5e-3,
        f"gamma_minus relative error {rel_m:.3e}",
        "< 5e-3",
        details,
    )


@_timed
def check_wootters(seed: int = 20240611) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(200):
        s = random_xstate(rng)
        worst = max(worst, abs(wootters(density_matrix(s)).value - concurrence_x(s).value))
    bell = wootters(density_matrix(XStateStandard(0.5, 0, 0, 0.5, w=0.5))).value
    prod = wootters(density_matrix(XStateStandard(1.0, 0, 0, 0))).value
    p = 0.8
    werner = wootters(density_matrix(XStateStandard((1 - p) / 4, (1 + p) / 4, (1 + p) / 4, (1 - p) / 4, y=p / 2))).value
    ok = worst < 1e-9 and abs(bell - 1) < 1e-9 and abs(prod) < 1e-9 and abs(werner - 0.7) < 1e-9
    return CheckResult(
        "C10",
        "Wootters vs X-state formula",
        ok,
        f"max diff {worst:.2e} on 200 states; Bell {bell:.12f}, product {prod:.1e}, Werner(0.8) {werner:.12f}",
        "< 1e-9; 1, 0, 0.7 +- 1e-9",
    )


def zero_crossings(fn, t_max: float, samples: int) -> np.ndarray:
    t = np.linspace(0.0, t_max, samples)
    g = fn(t)
    idx = np.flatnonzero(np.sign(g[1:]) * np.sign(g[:-1]) < 0)
    return np.array([brentq(fn, t[i], t[i + 1], xtol=1e-14) for i in idx])


@_timed
def check_comparator() -> CheckResult:
    weak = ComparatorParams(gamma_M=0.01, lam=1.0)
    lt = np.linspace(0.0, 500.0, 50001)
    werr = float(np.abs(comparator_G(lt, weak) - np.exp(-weak.gamma_M * lt / 2)).max())
    strong = ComparatorParams(gamma_M=100.0, lam=1.0)
    zc = zero_crossings(lambda t: comparator_G(t, strong), 10.0, 20001)
    spacing = float(np.diff(zc).mean()) if zc.size > 1 else float("nan")
    expected = math.pi / math.sqrt(strong.gamma_M * strong.lam / 2)
    rel = abs(spacing - expected) / expected
    return CheckResult(
        "C11",
        "comparator G(t) weak/strong coupling limits",
        werr < 0.01 and rel < 0.05,
        f"weak max|G - exp(-gt/2)| {werr:.2e}; strong zero spacing {spacing:.5f} vs {expected:.5f} "
        f"(rel {rel:.2e}, {zc.size} zeros)",
        "< 0.01 and within 5%",
    )


def run_all() -> list[CheckResult]:
    grid, runs = _oracle_runs()
    return [
        check_markovian_limit(),
        check_dimensionless_rates(),
        check_rate_quadrature(),
        check_reduced_cross(),
        check_oracle_sanity(runs),
        check_adjudication(grid, runs),
        check_entanglement_generation(),
        check_oscillation_criterion(),
        check_rescaled_collapse(),
        check_large_q_approximation(),
        check_wootters(),
        check_comparator(),
    ]


def render_report(results: list[CheckResult]) -> str:
    out = ["# Verification report", ""]
    for r in results:
        out.append(r.line() + f"  [{r.elapsed:.2f} s]")
    for r in results:
        if r.details:
            out += ["", f"## {r.key} {r.title}", ""]
            out += [f"    {d}" for d in r.details]
    n_fail = sum(not r.passed for r in results)
    out += ["", f"{len(results) - n_fail}/{len(results)} checks passed"]
    return "\n".join(out) + "\n"
