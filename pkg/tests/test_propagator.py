import math

import numpy as np
import pytest

from nmentangle.propagator import (
    EvolutionMode,
    StepSizeError,
    evolve_eigen,
    evolve_reduced_numeric,
    max_deviation,
    max_numeric_step,
)
from nmentangle.states import (
    EigenbasisState,
    InvalidStateError,
    ModelParams,
    XStateStandard,
    eigen_from_standard,
    make_pure_xstate,
    random_xstate,
)

GM_111 = 0.172610031086721950
GP_111 = 0.103010460965436520
P11 = ModelParams.from_dimensionless(1.0, 1.0)
GROUND_EXCITED = EigenbasisState(1.0, 0.0, 0.0, 0.0)


def test_initial_state_reproduced_exactly():
    E0 = eigen_from_standard(XStateStandard(0.3, 0.25, 0.15, 0.3, w=0.2 + 0.1j, y=0.1 - 0.05j))
    for mode in EvolutionMode:
        traj = evolve_eigen(E0, P11, [0.0, 0.5], mode)
        assert traj.state(0) == E0


def test_singlet_triplet_decay_reference():
    traj = evolve_eigen(EigenbasisState(0, 1, 0, 0), P11, [1.0])
    b = math.exp(-2 * GM_111)
    assert traj.b[0] == pytest.approx(b, abs=1e-13)
    assert abs(traj.b[0] - 0.708063) < 2e-6
    assert traj.d[0] == pytest.approx(1 - b, abs=1e-13)
    assert traj.a[0] == traj.e[0] == 0.0 and traj.c[0] == traj.h[0] == 0


def test_both_modes_agree_without_top_population():
    E0 = eigen_from_standard(make_pure_xstate(1.1))
    grid = np.linspace(0, 3, 7)
    pl = evolve_eigen(E0, P11, grid, "paper-literal")
    tc = evolve_eigen(E0, P11, grid, "trace-conserving")
    assert max(max_deviation(pl, tc).values()) < 1e-14


def test_top_population_trace_conserving():
    traj = evolve_eigen(GROUND_EXCITED, P11, [1.0], EvolutionMode.TRACE_CONSERVING)
    # exp(-2 (G- + G+)) from 30-digit quadrature
    assert traj.a[0] == pytest.approx(0.576234268916437567, abs=1e-13)
    assert abs(traj.trace[0] - 1) < 1e-14


def test_top_population_paper_literal_decays_at_half_rate():
    traj = evolve_eigen(GROUND_EXCITED, P11, [1.0], EvolutionMode.PAPER_LITERAL)
    assert traj.a[0] == pytest.approx(math.exp(-(GM_111 + GP_111)), abs=1e-13)


def test_markovian_corner_value():
    traj = evolve_eigen(EigenbasisState(0, 1, 0, 0), ModelParams.from_dimensionless(0.0, 100.0), [2.0])
    assert traj.b[0] == pytest.approx(math.exp(-2 * 0.995), abs=1e-12)


@pytest.mark.parametrize("mode", list(EvolutionMode))
def test_d_identity_matches_nested_quadrature(mode):
    E0 = EigenbasisState(0.4, 0.2, 0.3, 0.1)
    traj = evolve_eigen(E0, P11, np.linspace(0, 2, 5), mode, d_quadrature=True)
    if mode is EvolutionMode.PAPER_LITERAL:
        np.testing.assert_allclose(traj.d, traj.d_quadrature, atol=1e-9)
    else:
        assert np.abs(traj.trace - 1).max() < 1e-13


def test_d_quadrature_agrees_without_top_population():
    E0 = eigen_from_standard(make_pure_xstate(2.0))
    traj = evolve_eigen(E0, ModelParams.from_dimensionless(5.0, 0.04), np.linspace(0, 10, 6), d_quadrature=True)
    np.testing.assert_allclose(traj.d, traj.d_quadrature, atol=1e-6)


def test_trace_conserving_invariants_random_states():
    rng = np.random.default_rng(11)
    grid = np.linspace(0, 8, 41)
    for Q, R in ((0, 100), (1, 1), (10, 0.01)):
        p = ModelParams.from_dimensionless(Q, R)
        for _ in range(5):
            traj = evolve_eigen(eigen_from_standard(random_xstate(rng)), p, grid)
            traj.check(1e-8)


@pytest.mark.parametrize("mode", list(EvolutionMode))
@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi])
def test_numeric_cross_check(mode, theta):
    E0 = eigen_from_standard(make_pure_xstate(theta))
    grid = np.linspace(0, 2, 11)
    ana = evolve_eigen(E0, P11, grid, mode)
    num = evolve_reduced_numeric(E0, P11, grid, mode)
    assert max(max_deviation(ana, num).values()) < 1e-8


def test_numeric_cross_check_with_top_population():
    E0 = eigen_from_standard(XStateStandard(0.3, 0.25, 0.15, 0.3, w=0.2 + 0.1j, y=0.1 - 0.05j))
    p = ModelParams.from_dimensionless(5.0, 0.04)
    grid = np.linspace(0, 4, 9)
    for mode in EvolutionMode:
        dev = max_deviation(evolve_eigen(E0, p, grid, mode), evolve_reduced_numeric(E0, p, grid, mode))
        assert max(dev.values()) < 1e-8


def test_step_size_guard():
    hmax = max_numeric_step(P11)
    assert hmax <= 1e-3 * P11.fastest_timescale
    with pytest.raises(StepSizeError):
        evolve_reduced_numeric(EigenbasisState(0, 1, 0, 0), P11, [1.0], step=2 * hmax)


def test_grid_and_state_validation():
    with pytest.raises(ValueError):
        evolve_eigen(EigenbasisState(0, 1, 0, 0), P11, [0.5, 0.2])
    with pytest.raises(ValueError):
        evolve_eigen(EigenbasisState(0, 1, 0, 0), P11, [-1.0])
    with pytest.raises(InvalidStateError):
        evolve_eigen(EigenbasisState(0, 0.7, 0, 0), P11, [1.0])
