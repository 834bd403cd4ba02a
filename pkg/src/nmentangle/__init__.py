"""Entanglement dynamics of two Heisenberg-coupled qubits, each damped by its
own Lorentzian (non-Markovian) reservoir.

Closed-form decay exponents, an integrating-factor propagator for X states,
an independent full master-equation integrator, concurrence and sweeps.
"""

from .concurrence import (
    ComparatorParams,
    comparator_concurrence,
    comparator_G,
    concurrence_x,
    exact_concurrence,
    figure_concurrence,
    wootters,
)
from .oracle import integrate_master, master_rhs
from .propagator import EvolutionMode, Trajectory, evolve_eigen, evolve_reduced_numeric
from .rates import gamma_approx, gamma_dimless, gamma_phase, memory_rates
from .regimes import SweepSpec, classify_regime, oscillation_metrics, run_sweep
from .states import (
    EigenbasisState,
    ModelParams,
    XStateStandard,
    density_matrix,
    eigen_from_standard,
    make_pure_xstate,
    standard_from_eigen,
)

__version__ = "0.1.0"

__all__ = [
    "ComparatorParams",
    "EigenbasisState",
    "EvolutionMode",
    "ModelParams",
    "SweepSpec",
    "Trajectory",
    "XStateStandard",
    "classify_regime",
    "comparator_G",
    "comparator_concurrence",
    "concurrence_x",
    "density_matrix",
    "eigen_from_standard",
    "evolve_eigen",
    "evolve_reduced_numeric",
    "exact_concurrence",
    "figure_concurrence",
    "gamma_approx",
    "gamma_dimless",
    "gamma_phase",
    "integrate_master",
    "make_pure_xstate",
    "master_rhs",
    "memory_rates",
    "oscillation_metrics",
    "run_sweep",
    "standard_from_eigen",
    "wootters",
]
