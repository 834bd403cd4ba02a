import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmentangle.concurrence import (
    ComparatorParams,
    comparator_concurrence,
    comparator_G,
    concurrence_x,
    exact_concurrence,
    figure_concurrence,
    wootters,
)
from nmentangle.propagator import EvolutionMode, evolve_eigen
from nmentangle.rates import gamma_dimless
from nmentangle.states import (
    InvalidStateError,
    ModelParams,
    XStateStandard,
    density_matrix,
    eigen_from_standard,
    make_pure_xstate,
    random_xstate,
)

BELL = XStateStandard(0.5, 0, 0, 0.5, w=0.5)
WERNER_08 = XStateStandard(0.05, 0.45, 0.45, 0.05, y=0.4)


def _random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_reference_states():
    assert wootters(density_matrix(BELL)).value == pytest.approx(1.0, abs=1e-12)
    assert wootters(density_matrix(XStateStandard(1, 0, 0, 0))).value == 0.0
    assert abs(wootters(density_matrix(WERNER_08)).value - 0.7) < 1e-12
    assert concurrence_x(BELL).value == pytest.approx(1.0, abs=1e-15)
    assert concurrence_x(make_pure_xstate(math.pi / 2)).value == pytest.approx(1.0, abs=1e-15)
    assert concurrence_x(WERNER_08).value == pytest.approx(0.7, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.floats(min_value=0.0, max_value=1.0))
def test_wootters_matches_x_formula(seed, frac):
    s = random_xstate(np.random.default_rng(seed), pure_fraction=frac)
    assert abs(wootters(density_matrix(s)).value - concurrence_x(s).value) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    U = np.kron(_random_unitary(rng), _random_unitary(rng))
    c1 = wootters(rho).value
    c2 = wootters(U @ rho @ U.conj().T).value
    assert abs(c1 - c2) < 1e-9


def test_general_pure_state():
    alpha, beta = 0.6, 0.8j
    psi = np.array([alpha, 0.3, -0.2, beta])
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    assert wootters(rho).value == pytest.approx(2 * abs(psi[0] * psi[3] - psi[1] * psi[2]), abs=1e-12)


def test_wootters_rejects_invalid_matrix():
    with pytest.raises(InvalidStateError):
        wootters(np.diag([0.6, 0.6, -0.2, 0.0]))


def test_figure_mode_values():
    assert figure_concurrence(0.0, 3.0, 0.1, 1.0) == pytest.approx(math.sin(1.0), abs=1e-15)
    assert figure_concurrence(2.0, 0.0, 100.0, math.pi / 2) == pytest.approx(0.369723444544058975, abs=1e-13)
    assert abs(figure_concurrence(2.0, 0.0, 100.0, math.pi / 2) - math.exp(-1)) < 2e-3
    assert figure_concurrence(1.0, 1.0, 1.0, math.pi / 2) == pytest.approx(0.841465696332834392, abs=1e-13)


def test_figure_mode_markovian_collapse():
    tau = np.linspace(0, 5, 101)
    C = figure_concurrence(tau, 0.0, 1e4, math.pi / 3)
    np.testing.assert_allclose(C, math.sin(math.pi / 3) * np.exp(-tau / 2), atol=1e-4)


def test_figure_mode_takes_modulus():
    theta = 0.2
    tau = np.linspace(0, 10, 201)
    gm, gp = gamma_dimless(tau, 2.0, 1.0)
    c0 = math.sin(theta)
    signed = 0.5 * (1 + c0) * np.exp(-gm) - 0.5 * (1 - c0) * np.exp(-gp)
    assert signed.min() < 0
    C = figure_concurrence(tau, 2.0, 1.0, theta)
    np.testing.assert_allclose(C, np.abs(signed), atol=1e-15)
    assert C.min() >= 0


def test_exact_mode_examples():
    grid = np.linspace(0, 20, 401)
    traj = evolve_eigen(eigen_from_standard(make_pure_xstate(math.pi / 2)), ModelParams(1, 1, 1), grid)
    assert exact_concurrence(traj)[0] == pytest.approx(1.0, abs=1e-15)
    E_pi = eigen_from_standard(make_pure_xstate(math.pi))
    C = exact_concurrence(evolve_eigen(E_pi, ModelParams.from_dimensionless(5.0, 0.04), grid))
    assert C[0] < 1e-15 and C.max() > 0.01
    C = exact_concurrence(evolve_eigen(E_pi, ModelParams.from_dimensionless(0.0, 100.0), grid))
    assert C.max() < 1e-3


def test_exact_mode_accepts_paper_literal_trace():
    E0 = eigen_from_standard(XStateStandard(0.4, 0.1, 0.1, 0.4, w=0.3))
    traj = evolve_eigen(E0, ModelParams(1, 1, 1), np.linspace(0, 3, 7), EvolutionMode.PAPER_LITERAL)
    C = exact_concurrence(traj)
    assert np.all((C >= 0) & (C <= 1))


def test_comparator_basics():
    cp = ComparatorParams(gamma_M=0.3, lam=2.0)
    assert comparator_G(0.0, cp) == pytest.approx(1.0, abs=1e-15)
    d = math.sqrt(1 - 2 * 0.3 / 2.0)
    t = np.linspace(0, 4, 9)
    ref = np.exp(-t) * (np.cosh(t * d) + np.sinh(t * d) / d)
    np.testing.assert_allclose(comparator_G(t, cp), ref, atol=1e-14)
    assert comparator_concurrence(1.0, 0.8, cp) == pytest.approx(0.8 * comparator_G(1.0, cp))


def test_comparator_limits():
    weak = ComparatorParams(gamma_M=0.01, lam=1.0)
    t = np.linspace(0, 500, 20001)
    assert np.abs(comparator_G(t, weak) - np.exp(-0.005 * t)).max() < 0.01
    strong = ComparatorParams(gamma_M=100.0, lam=1.0)
    assert np.iscomplex(strong.delta)
    g = comparator_G(np.linspace(0, 10, 10001), strong)
    assert g.min() < 0


def test_comparator_continuity_at_critical_damping():
    lam = 1.0
    t = np.linspace(0, 30, 301)
    crit = ComparatorParams(gamma_M=0.5 * lam, lam=lam)
    assert crit.delta == 0
    near = ComparatorParams(gamma_M=0.5 * lam * (1 - 1e-12), lam=lam)
    assert abs(near.delta - 1e-6) < 1e-9
    assert np.abs(comparator_G(t, near) - comparator_G(t, crit)).max() < 1e-8


def test_comparator_no_overflow():
    g = comparator_G(np.array([1e4, 1e6]), ComparatorParams(gamma_M=0.1, lam=10.0))
    assert np.all(np.isfinite(g))
