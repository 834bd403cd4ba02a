"""Two-qubit X states, the Heisenberg spectrum, and parameter containers.

Basis order throughout is the product basis |00>, |01>, |10>, |11> with
|0> the excited (spin-up) level. Eigenbasis coefficients refer to

    psi1 = |00>,  psi2 = (|01> + |10>)/sqrt2,
    psi3 = (|01> - |10>)/sqrt2,  psi4 = |11>

with energies (J, 0, -2J, J). hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STATE_TOL = 1e-12

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


class InvalidStateError(ValueError):
    """Raised when a state violates normalization or positivity."""


@dataclass(frozen=True)
class XStateStandard:
    """X state in the product basis: populations u, x1, x2, v and coherences w, y.

    ``w`` is the |00><11| element and ``y`` the |01><10| element.
    """

    u: float
    x1: float
    x2: float
    v: float
    w: complex = 0j
    y: complex = 0j

    @property
    def trace(self) -> float:
        return self.u + self.x1 + self.x2 + self.v


@dataclass(frozen=True)
class EigenbasisState:
    """X state expanded on the Hamiltonian eigenbasis.

    a, b, e, d are the psi1..psi4 populations; c = <psi1|rho|psi4> and
    h = <psi2|rho|psi3>.
    """

    a: float
    b: float
    e: float
    d: float
    c: complex = 0j
    h: complex = 0j

    @property
    def trace(self) -> float:
        return self.a + self.b + self.e + self.d


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters: coupling J, bath width lam, Markovian rate gamma_M."""

    J: float
    lam: float
    gamma_M: float

    def __post_init__(self):
        for name in ("J", "lam", "gamma_M"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.J < 0:
            raise ValueError("J must be >= 0")
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if self.gamma_M <= 0:
            raise ValueError("gamma_M must be > 0")

    @classmethod
    def from_dimensionless(cls, Q: float, R: float, gamma_M: float = 1.0) -> "ModelParams":
        lam = R * gamma_M
        return cls(J=Q * lam, lam=lam, gamma_M=gamma_M)

    def dimensionless(self) -> "DimensionlessParams":
        return DimensionlessParams(Q=self.J / self.lam, R=self.lam / self.gamma_M)

    @property
    def fastest_timescale(self) -> float:
        """min(1/lam, 1/(3J), 1/gamma_M); the 3J term drops out when J = 0."""
        scales = [1.0 / self.lam, 1.0 / self.gamma_M]
        if self.J > 0:
            scales.append(1.0 / (3.0 * self.J))
        return min(scales)


@dataclass(frozen=True)
class DimensionlessParams:
    """Q = J/lam and R = lam/gamma_M."""

    Q: float
    R: float

    def __post_init__(self):
        if not (math.isfinite(self.Q) and math.isfinite(self.R)):
            raise ValueError("Q and R must be finite")
        if self.Q < 0:
            raise ValueError("Q must be >= 0")
        if self.R <= 0:
            raise ValueError("R must be > 0")

    def tau(self, t, gamma_M: float = 1.0):
        return gamma_M * np.asarray(t, dtype=float)

    def tau_prime(self, tau):
        return tau_prime_from_tau(tau, self.Q)


def tau_prime_from_tau(tau, Q: float):
    """Rescaled time tau' = tau / Q**2 (undefined for Q = 0)."""
    if Q <= 0:
        raise ValueError("rescaled time tau' requires Q > 0")
    return np.asarray(tau, dtype=float) / Q**2


def tau_from_tau_prime(tau_prime, Q: float):
    if Q <= 0:
        raise ValueError("rescaled time tau' requires Q > 0")
    return np.asarray(tau_prime, dtype=float) * Q**2


# --- Hamiltonian --------------------------------------------------------------


def qubit_operator(op: np.ndarray, qubit: int) -> np.ndarray:
    """Embed a single-qubit operator on qubit 1 or 2 of the pair."""
    if qubit == 1:
        return np.kron(op, ID2)
    if qubit == 2:
        return np.kron(ID2, op)
    raise ValueError("qubit must be 1 or 2")


def heisenberg_hamiltonian(J: float) -> np.ndarray:
    """H = J [s1+ s2- + s1- s2+ + s1z s2z] in the product basis."""
    s1p, s1m = qubit_operator(SIGMA_PLUS, 1), qubit_operator(SIGMA_MINUS, 1)
    s2p, s2m = qubit_operator(SIGMA_PLUS, 2), qubit_operator(SIGMA_MINUS, 2)
    s1z, s2z = qubit_operator(SIGMA_Z, 1), qubit_operator(SIGMA_Z, 2)
    return J * (s1p @ s2m + s1m @ s2p + s1z @ s2z)


@dataclass(frozen=True)
class HamiltonianSpectrum:
    J: float
    energies: np.ndarray  # (4,)
    vectors: np.ndarray  # (4, 4), column i is psi_{i+1}

    def residual(self) -> float:
        H = heisenberg_hamiltonian(self.J)
        return float(np.abs(H @ self.vectors - self.vectors * self.energies).max())

    def orthonormality_error(self) -> float:
        V = self.vectors
        return float(np.abs(V.conj().T @ V - np.eye(4)).max())


def spectrum(J: float) -> HamiltonianSpectrum:
    if J < 0:
        raise ValueError("J must be >= 0")
    s = 1.0 / math.sqrt(2.0)
    vectors = np.array(
        [
            [1, 0, 0, 0],
            [0, s, s, 0],
            [0, s, -s, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )
    energies = np.array([J, 0.0, -2.0 * J, J])
    return HamiltonianSpectrum(J=J, energies=energies, vectors=vectors)


# --- X-state construction and maps ----------------------------------------------


def make_pure_xstate(theta: float) -> XStateStandard:
    """cos(theta/2)|01> + sin(theta/2)|10>, initial concurrence |sin theta|."""
    if not 0.0 <= theta <= 2.0 * math.pi:
        raise ValueError("theta must lie in [0, 2*pi]")
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return XStateStandard(u=0.0, x1=c * c, x2=s * s, v=0.0, w=0j, y=complex(c * s))


def xstate_violation(s: XStateStandard, tol: float = STATE_TOL, check_trace: bool = True) -> str | None:
    """Name the first violated X-state constraint, or None if the state is valid."""
    pops = {"u": s.u, "x1": s.x1, "x2": s.x2, "v": s.v}
    for name, val in pops.items():
        if not math.isfinite(val):
            return f"{name} is not finite"
    for name, val in (("w", s.w), ("y", s.y)):
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            return f"{name} is not finite"
    for name, val in pops.items():
        if val < -tol:
            return f"population {name} >= 0 violated by {-val:.3e}"
    resid = s.trace - 1.0
    if check_trace and abs(resid) > tol:
        return f"trace: u + x1 + x2 + v = 1 violated by {resid:.3e}"
    gap = abs(s.w) - math.sqrt(max(s.u, 0.0) * max(s.v, 0.0))
    if gap > tol:
        return f"sqrt(uv) >= |w| violated by {gap:.3e}"
    gap = abs(s.y) - math.sqrt(max(s.x1, 0.0) * max(s.x2, 0.0))
    if gap > tol:
        return f"sqrt(x1 x2) >= |y| violated by {gap:.3e}"
    return None


def validate_xstate(s: XStateStandard, tol: float = STATE_TOL) -> XStateStandard:
    msg = xstate_violation(s, tol)
    if msg is not None:
        raise InvalidStateError(msg)
    return s


def eigen_violation(E: EigenbasisState, tol: float = STATE_TOL) -> str | None:
    for name in ("a", "b", "e", "d"):
        val = getattr(E, name)
        if not math.isfinite(val):
            return f"{name} is not finite"
        if val < -tol:
            return f"population {name} >= 0 violated by {-val:.3e}"
    resid = E.trace - 1.0
    if abs(resid) > tol:
        return f"trace: a + b + e + d = 1 violated by {resid:.3e}"
    return None


def validate_eigen(E: EigenbasisState, tol: float = STATE_TOL) -> EigenbasisState:
    msg = eigen_violation(E, tol)
    if msg is not None:
        raise InvalidStateError(msg)
    return E


def eigen_from_standard(s: XStateStandard, check: bool = True) -> EigenbasisState:
    if check:
        validate_xstate(s)
    y, yc = complex(s.y), complex(s.y).conjugate()
    return EigenbasisState(
        a=s.u,
        b=((s.x1 + s.x2 + y + yc) / 2).real,
        e=((s.x1 + s.x2 - y - yc) / 2).real,
        d=s.v,
        c=complex(s.w),
        h=(s.x1 - s.x2 - y + yc) / 2,
    )


def standard_from_eigen(E: EigenbasisState, check: bool = True) -> XStateStandard:
    if check:
        validate_eigen(E)
    h, hc = complex(E.h), complex(E.h).conjugate()
    return XStateStandard(
        u=E.a,
        x1=((E.b + h + hc + E.e) / 2).real,
        x2=((E.b - h - hc + E.e) / 2).real,
        v=E.d,
        w=complex(E.c),
        y=(E.b - h + hc - E.e) / 2,
    )


def density_matrix(s: XStateStandard, check: bool = True) -> np.ndarray:
    """4x4 density matrix of an X state in the product basis."""
    if check:
        validate_xstate(s)
    rho = np.diag(np.array([s.u, s.x1, s.x2, s.v], dtype=complex))
    rho[0, 3], rho[3, 0] = s.w, np.conj(s.w)
    rho[1, 2], rho[2, 1] = s.y, np.conj(s.y)
    return rho


def eigen_density_matrix(E: EigenbasisState) -> np.ndarray:
    """Density matrix with entries in the psi basis (not the product basis)."""
    rho = np.diag(np.array([E.a, E.b, E.e, E.d], dtype=complex))
    rho[0, 3], rho[3, 0] = E.c, np.conj(E.c)
    rho[1, 2], rho[2, 1] = E.h, np.conj(E.h)
    return rho


def xstate_from_matrix(rho: np.ndarray) -> XStateStandard:
    """Read the X-block entries of a product-basis density matrix."""
    return XStateStandard(
        u=float(rho[0, 0].real),
        x1=float(rho[1, 1].real),
        x2=float(rho[2, 2].real),
        v=float(rho[3, 3].real),
        w=complex(rho[0, 3]),
        y=complex(rho[1, 2]),
    )


X_BLOCK_MASK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


def off_x_leakage(rho: np.ndarray) -> float:
    """Largest magnitude outside the X pattern (same pattern in both bases)."""
    return float(np.abs(np.where(X_BLOCK_MASK, 0, rho)).max())


def check_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> None:
    """Raise InvalidStateError unless rho is Hermitian, unit-trace and PSD to tol."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("density matrix has non-finite entries")
    herm = float(np.abs(rho - rho.conj().T).max())
    if herm > tol:
        raise InvalidStateError(f"not Hermitian: residual {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidStateError(f"trace != 1: {tr:.12g}")
    lo = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    if lo < -tol:
        raise InvalidStateError(f"not positive semidefinite: min eigenvalue {lo:.3e}")


def random_xstate(rng: np.random.Generator, pure_fraction: float = 1.0) -> XStateStandard:
    """Random valid X state: Dirichlet populations, coherences with random
    phase and modulus up to ``pure_fraction`` of the positivity bound."""
    u, x1, x2, v = rng.dirichlet(np.ones(4))
    w = pure_fraction * rng.uniform() * math.sqrt(u * v) * np.exp(2j * math.pi * rng.uniform())
    y = pure_fraction * rng.uniform() * math.sqrt(x1 * x2) * np.exp(2j * math.pi * rng.uniform())
    return XStateStandard(u=float(u), x1=float(x1), x2=float(x2), v=float(v), w=complex(w), y=complex(y))
