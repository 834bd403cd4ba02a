import math

import numpy as np
import pytest
from scipy.integrate import quad

from nmentangle.concurrence import wootters
from nmentangle.oracle import (
    build_eigen_operators,
    generator_matrix,
    integrate_master,
    master_rhs,
    memory_kernel,
)
from nmentangle.propagator import EvolutionMode, evolve_eigen
from nmentangle.rates import gamma_phase, kernel_phases
from nmentangle.states import (
    ModelParams,
    XStateStandard,
    density_matrix,
    eigen_from_standard,
    heisenberg_hamiltonian,
    make_pure_xstate,
    random_xstate,
)

P11 = ModelParams.from_dimensionless(1.0, 1.0)
MIXED = XStateStandard(0.3, 0.25, 0.15, 0.3, w=0.2 + 0.1j, y=0.1 - 0.05j)


def test_ladder_matrix_elements():
    ops = build_eigen_operators(1.0)
    assert ops.raising[0][0, 1] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert ops.raising[0][0, 2] == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
    assert ops.raising[1][0, 2] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    for lo, hi in zip(ops.lowering, ops.raising):
        assert np.abs(hi - lo.conj().T).max() < 1e-15


def test_kernel_limits():
    p = ModelParams(0.7, 1.2, 0.9)
    assert np.abs(memory_kernel(0.0, p, 1)).max() == 0.0
    ops = build_eigen_operators(p.J)
    K_inf = memory_kernel(200.0, p, 2, ops=ops)
    expected = 0.5 * p.gamma_M * p.lam * ops.lowering[1] / (p.lam + 1j * ops.bohr)
    assert np.abs(K_inf - expected).max() < 1e-14


def test_kernel_matches_quadrature():
    p = ModelParams(0.7, 1.2, 0.9)
    t = 1.7
    ops = build_eigen_operators(p.J)
    K = memory_kernel(t, p, 1, ops=ops)
    L = ops.lowering[0]
    for j, k in zip(*np.nonzero(np.abs(L) > 0)):
        w = ops.bohr[j, k]
        f = lambda s, part: part(0.5 * p.gamma_M * p.lam * np.exp(-(p.lam + 1j * w) * s))
        ref = quad(f, 0, t, args=(np.real,), epsabs=1e-14)[0] + 1j * quad(f, 0, t, args=(np.imag,), epsabs=1e-14)[0]
        assert abs(K[j, k] - L[j, k] * ref) < 1e-10


def test_rhs_at_zero_is_unitary_part():
    rho = density_matrix(MIXED)
    H = heisenberg_hamiltonian(P11.J)
    np.testing.assert_allclose(master_rhs(0.0, rho, P11), -1j * (H @ rho - rho @ H), atol=1e-15)


def test_rhs_hermitian_and_traceless():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        out = master_rhs(0.8, rho, P11)
        assert np.abs(out - out.conj().T).max() < 1e-13
        assert abs(np.trace(out)) < 1e-13


def test_generator_matches_rhs():
    rho = density_matrix(MIXED)
    for t in (0.0, 0.3, 2.0):
        vec = generator_matrix(t, P11) @ rho.reshape(16)
        np.testing.assert_allclose(vec.reshape(4, 4), master_rhs(t, rho, P11), atol=1e-14)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        master_rhs(0.0, np.triu(np.ones((4, 4))) / 4, P11)


def test_independent_markovian_decay():
    p = ModelParams(J=0.0, lam=200.0, gamma_M=1.0)
    grid = np.linspace(0, 3, 7)
    m = integrate_master(density_matrix(XStateStandard(0, 0, 1, 0)), p, grid)
    excited = m.states[:, 2, 2].real + m.states[:, 0, 0].real
    # time-local single-qubit decay; within 1/lam of the exp(-gamma_M t) envelope
    exact = np.exp(-(grid - (1 - np.exp(-p.lam * grid)) / p.lam))
    np.testing.assert_allclose(excited, exact, atol=1e-10)
    np.testing.assert_allclose(excited, np.exp(-grid), atol=1 / p.lam)


def test_invariants_random_states():
    rng = np.random.default_rng(5)
    grid = np.linspace(0, 10, 21)
    for _ in range(3):
        m = integrate_master(density_matrix(random_xstate(rng)), ModelParams.from_dimensionless(5.0, 0.04), grid)
        assert m.trace_drift < 1e-7
        assert m.hermiticity_drift < 1e-12
        assert m.leakage < 1e-9 and m.eigen_leakage() < 1e-9


@pytest.mark.parametrize("Q, R", [(1.0, 1.0), (0.0, 100.0), (5.0, 0.04)])
def test_populations_follow_trace_conserving_reading(Q, R):
    p = ModelParams.from_dimensionless(Q, R)
    grid = np.linspace(0, 6, 13)
    E0 = eigen_from_standard(MIXED)
    m = integrate_master(density_matrix(MIXED), p, grid)
    ora = np.array([[x.a, x.b, x.e, x.d] for x in m.eigen_states()])
    tc = evolve_eigen(E0, p, grid, EvolutionMode.TRACE_CONSERVING)
    pl = evolve_eigen(E0, p, grid, EvolutionMode.PAPER_LITERAL)
    assert np.abs(ora - tc.as_array()[:, :4].real).max() < 1e-9
    assert np.abs(ora - pl.as_array()[:, :4].real).max() > 1e-2


@pytest.mark.parametrize("Q, R", [(1.0, 1.0), (5.0, 0.04)])
def test_coherence_phases_follow_memory_integral(Q, R):
    p = ModelParams.from_dimensionless(Q, R)
    grid = np.linspace(0, 6, 13)
    E0 = eigen_from_standard(MIXED)
    ora = integrate_master(density_matrix(MIXED), p, grid).eigen_states()
    rb = gamma_phase(grid, p)
    sm, sp = kernel_phases(grid, p)
    c = E0.c * np.exp(-1j * (sm + sp) - rb.gamma_total)
    h = E0.h * np.exp(-1j * (2 * p.J * grid + sp - sm) - rb.gamma_total)
    assert np.abs(np.array([x.c for x in ora]) - c).max() < 1e-9
    assert np.abs(np.array([x.h for x in ora]) - h).max() < 1e-9


def test_pure_state_concurrence_decays_with_full_exponent():
    grid = np.linspace(0, 4, 9)
    m = integrate_master(density_matrix(make_pure_xstate(math.pi / 2)), P11, grid)
    C = np.array([wootters(r, tol=1e-7).value for r in m.states])
    np.testing.assert_allclose(C, np.exp(-2 * gamma_phase(grid, P11).gamma_minus), atol=1e-9)


def test_step_validation():
    with pytest.raises(ValueError):
        integrate_master(density_matrix(MIXED), P11, [1.0], step=1.0)
