"""Direct integration of the time-local master equation on the 4x4 density matrix.

    drho/dt = -i[H, rho] + sum_i ( K_i rho s_i+ - s_i+ K_i rho + h.c. )

with K_i(t) = int_0^t Phi(tau) s_i-(-tau) dtau and
Phi(tau) = (gamma_M lam / 2) exp(-lam tau). Expanding s_i- on the
eigenbasis, each entry of K_i is elementary:

    K_jk(t) = M_jk (gamma_M lam / 2) (1 - exp(-(lam + i D_jk) t)) / (lam + i D_jk)

with D_jk = eps_j - eps_k. This module knows nothing about the reduced
coefficient equations; it is the reference they are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .concurrence import hermitian_eigvalsh
from .states import (
    SIGMA_MINUS,
    EigenbasisState,
    ModelParams,
    check_density_matrix,
    heisenberg_hamiltonian,
    off_x_leakage,
    qubit_operator,
    spectrum,
)

STEP_DIVISOR = 50


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenOperatorSet:
    """Ladder operators of both qubits with matrix elements in the psi basis."""

    J: float
    lowering: tuple[np.ndarray, np.ndarray]  # <psi_j| s_i- |psi_k>
    raising: tuple[np.ndarray, np.ndarray]
    bohr: np.ndarray  # bohr[j, k] = eps_j - eps_k
    vectors: np.ndarray  # columns psi_1..psi_4 in the product basis

    def heisenberg(self, qubit: int, tau: float, raising: bool = True) -> np.ndarray:
        """s_i^{+/-}(tau) = exp(iH tau) s exp(-iH tau), in the psi basis."""
        m = (self.raising if raising else self.lowering)[qubit - 1]
        return m * np.exp(1j * self.bohr * tau)

    def to_product(self, m: np.ndarray) -> np.ndarray:
        V = self.vectors
        return V @ m @ V.conj().T


def build_eigen_operators(J: float) -> EigenOperatorSet:
    spec = spectrum(J)
    V = spec.vectors
    lowering = tuple(V.conj().T @ qubit_operator(SIGMA_MINUS, i) @ V for i in (1, 2))
    raising = tuple(m.conj().T for m in lowering)
    bohr = spec.energies[:, None] - spec.energies[None, :]
    return EigenOperatorSet(J=J, lowering=lowering, raising=raising, bohr=bohr, vectors=V)


def _kernel_factor(t, lam, bohr):
    mu = lam + 1j * bohr
    return -np.expm1(-mu * t) / mu


def memory_kernel(t: float, p: ModelParams, qubit: int, *, basis: str = "eigen", ops=None) -> np.ndarray:
    """K_i(t) for qubit 1 or 2, in the psi basis (default) or the product basis."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if qubit not in (1, 2):
        raise ValueError("qubit must be 1 or 2")
    ops = ops or build_eigen_operators(p.J)
    pref = 0.5 * p.gamma_M * p.lam
    K = ops.lowering[qubit - 1] * pref * _kernel_factor(t, p.lam, ops.bohr)
    if basis == "eigen":
        return K
    if basis == "product":
        return ops.to_product(K)
    raise ValueError("basis must be 'eigen' or 'product'")


def _commutator(a, b):
    return a @ b - b @ a


def master_rhs(t: float, rho: np.ndarray, p: ModelParams, *, ops=None) -> np.ndarray:
    """Right-hand side of the master equation in the product basis."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.abs(rho - rho.conj().T).max())
    if herm > 1e-10:
        raise ValueError(f"rho is not Hermitian (residual {herm:.3e})")
    ops = ops or build_eigen_operators(p.J)
    H = heisenberg_hamiltonian(p.J)
    out = -1j * _commutator(H, rho)
    for i in (1, 2):
        K = memory_kernel(t, p, i, basis="product", ops=ops)
        sp = qubit_operator(SIGMA_MINUS, i).conj().T
        term = K @ rho @ sp - sp @ K @ rho
        out += term + term.conj().T
    return out


# --- superoperator assembly (row-major vectorisation: vec(A X B) = kron(A, B.T) vec(X))


def _sup_left(a):
    return np.kron(a, np.eye(4))


def _sup_right(b):
    return np.kron(np.eye(4), b.T)


@dataclass(frozen=True)
class _Generator:
    L0: np.ndarray
    A: np.ndarray
    B: np.ndarray
    mus: np.ndarray
    pref: float


def _assemble_generator(p: ModelParams, ops: EigenOperatorSet) -> _Generator:
    """Split L(t) into a constant part and terms f_k(t) A_k + conj(f_k(t)) B_k,
    one per distinct Bohr frequency that carries a nonzero s- element."""
    H = heisenberg_hamiltonian(p.J)
    L0 = -1j * (_sup_left(H) - _sup_right(H))
    groups: dict[float, list[np.ndarray]] = {}
    for i in (1, 2):
        sm = qubit_operator(SIGMA_MINUS, i)
        sp = sm.conj().T
        M = ops.lowering[i - 1]
        for j, k in zip(*np.nonzero(np.abs(M) > 1e-15)):
            E = np.zeros((4, 4), dtype=complex)
            E[j, k] = M[j, k]
            C = ops.to_product(E)
            A = np.kron(C, sp.T) - _sup_left(sp @ C)
            B = np.kron(sm, C.conj()) - _sup_right(C.conj().T @ sm)
            key = round(float(ops.bohr[j, k]), 12)
            groups.setdefault(key, [np.zeros((16, 16), complex), np.zeros((16, 16), complex)])
            groups[key][0] += A
            groups[key][1] += B
    keys = sorted(groups)
    return _Generator(
        L0=L0,
        A=np.array([groups[k][0] for k in keys]),
        B=np.array([groups[k][1] for k in keys]),
        mus=np.array([p.lam + 1j * k for k in keys], dtype=complex),
        pref=0.5 * p.gamma_M * p.lam,
    )


def generator_matrix(t: float, p: ModelParams, ops=None) -> np.ndarray:
    """The 16x16 generator L(t) acting on row-major vec(rho)."""
    g = _assemble_generator(p, ops or build_eigen_operators(p.J))
    f = g.pref * -np.expm1(-g.mus * t) / g.mus
    return g.L0 + np.einsum("k,kij->ij", f, g.A) + np.einsum("k,kij->ij", f.conj(), g.B)


def default_step(p: ModelParams) -> float:
    return p.fastest_timescale / STEP_DIVISOR


@dataclass
class MasterTrajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 4, 4) product basis
    params: ModelParams
    step: float
    min_eigenvalues: np.ndarray

    @property
    def trace_drift(self) -> float:
        tr = np.trace(self.states, axis1=1, axis2=2)
        return float(np.abs(tr - tr[0]).max())

    @property
    def hermiticity_drift(self) -> float:
        return float(np.abs(self.states - self.states.conj().transpose(0, 2, 1)).max())

    @property
    def leakage(self) -> float:
        """Largest entry outside the X pattern, product basis."""
        return max(off_x_leakage(r) for r in self.states)

    def eigen_states(self) -> list[EigenbasisState]:
        V = spectrum(self.params.J).vectors
        return [eigen_coefficients(r, V) for r in self.states]

    def eigen_leakage(self) -> float:
        V = spectrum(self.params.J).vectors
        return max(off_x_leakage(V.conj().T @ r @ V) for r in self.states)

    @property
    def negativity_detected(self) -> bool:
        return bool(self.min_eigenvalues.min() < -1e-12)


def eigen_coefficients(rho: np.ndarray, V: np.ndarray) -> EigenbasisState:
    """Read (a, b, e, d, c, h) off a product-basis density matrix."""
    r = V.conj().T @ rho @ V
    return EigenbasisState(
        a=float(r[0, 0].real),
        b=float(r[1, 1].real),
        e=float(r[2, 2].real),
        d=float(r[3, 3].real),
        c=complex(r[0, 3]),
        h=complex(r[1, 2]),
    )


def integrate_master(rho0: np.ndarray, p: ModelParams, grid, step: float | None = None) -> MasterTrajectory:
    """Fixed-step RK4 of the master equation, reported at the grid times.

    The step defaults to min(1/lam, 1/(3J), 1/gamma_M)/50 (and may not exceed
    it); each grid interval is split into equal substeps no longer than that.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    check_density_matrix(rho0)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0 or grid[0] < 0 or np.any(np.diff(grid) < 0) or not np.all(np.isfinite(grid)):
        raise ValueError("grid must be finite, nonnegative and ascending")
    hmax = default_step(p)
    if step is None:
        step = hmax
    if not 0 < step <= hmax * (1 + 1e-12):
        raise ValueError(f"step {step:.3g} outside (0, {hmax:.3g}]")

    gen = _assemble_generator(p, build_eigen_operators(p.J))
    v = rho0.reshape(16).copy()
    states = np.empty((grid.size, 4, 4), dtype=complex)
    mins = np.empty(grid.size)
    t = 0.0
    for i, t_next in enumerate(grid):
        if t_next > t:
            n = math.ceil((t_next - t) / step * (1 - 1e-12))
            v = _kernels.rk4_linear(v, t, (t_next - t) / n, n, gen.L0, gen.A, gen.B, gen.mus, gen.pref)
            if not np.all(np.isfinite(v)):
                raise IntegrationError(f"non-finite density matrix at t={t_next:g}")
            t = t_next
        rho = v.reshape(4, 4)
        states[i] = rho
        mins[i] = hermitian_eigvalsh(rho).min()
    return MasterTrajectory(times=grid, states=states, params=p, step=step, min_eigenvalues=mins)
