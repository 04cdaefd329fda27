"""Hamiltonians of inductively coupled Josephson charge qubits.

Energies are dimensionless with hbar = 1; time is measured in 1/energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, UsageError
from .linalg import PAULI_X, PAULI_Y, PAULI_Z, HermitianOperator, embed, max_qubits


@dataclass(frozen=True)
class QubitCircuitParams:
    """Physical knobs of one SQUID-box qubit.

    ``phi_x`` is the external flux in units of the flux quantum, so the
    effective Josephson energy is ``2 * E_J0 * cos(pi * phi_x)``.
    """

    E_J0: float
    phi_x: float
    n_x: float
    E_ch: float
    E_L: float = 1.0

    def __post_init__(self):
        if not self.E_ch > 0:
            raise UsageError("E_ch must be positive")
        if not self.E_L > 0:
            raise UsageError("E_L must be positive")

    @property
    def E_J(self) -> float:
        return 2.0 * self.E_J0 * math.cos(math.pi * self.phi_x)

    @property
    def B_x(self) -> float:
        return -self.E_J

    @property
    def B_z(self) -> float:
        return -2.0 * self.E_ch * (1.0 - 2.0 * self.n_x)


@dataclass(frozen=True)
class TwoQubitParams:
    B: float
    J: float
    alpha: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", math.hypot(2.0 * self.B, self.J))

    @classmethod
    def from_circuit(cls, p: QubitCircuitParams) -> TwoQubitParams:
        """Identical qubits at the charge degeneracy point (B_z = 0)."""
        if p.B_z != 0:
            raise UsageError("the two-qubit model needs B_z = 0, i.e. n_x = 1/2")
        return cls(B=-p.E_J / 2.0, J=-p.E_J**2 / p.E_L)


@dataclass(frozen=True)
class NQubitParams:
    n_qubits: int
    B_x: tuple
    B_z: tuple
    J: np.ndarray

    def __post_init__(self):
        n = self.n_qubits
        if n < 1:
            raise UsageError("n_qubits must be positive")
        bx = tuple(float(v) for v in self.B_x)
        bz = tuple(float(v) for v in self.B_z)
        if len(bx) != n or len(bz) != n:
            raise UsageError("B_x and B_z need one entry per qubit")
        j = np.array(self.J, dtype=float)
        if j.shape != (n, n):
            raise UsageError(f"J must be {n}x{n}")
        if not np.allclose(j, j.T, rtol=0, atol=0) or np.any(np.diag(j)):
            raise UsageError("J must be symmetric with zero diagonal")
        j.setflags(write=False)
        object.__setattr__(self, "B_x", bx)
        object.__setattr__(self, "B_z", bz)
        object.__setattr__(self, "J", j)

    @classmethod
    def from_circuits(cls, circuits) -> NQubitParams:
        circuits = list(circuits)
        e_l = {c.E_L for c in circuits}
        if len(e_l) != 1:
            raise UsageError("all qubits must share one coupling inductor (equal E_L)")
        (e_l,) = e_l
        ej = np.array([c.E_J for c in circuits])
        j = -np.outer(ej, ej) / e_l
        np.fill_diagonal(j, 0.0)
        return cls(
            n_qubits=len(circuits),
            B_x=[c.B_x for c in circuits],
            B_z=[c.B_z for c in circuits],
            J=j,
        )

    @classmethod
    def uniform(cls, n_qubits: int, B_x: float, B_z: float, J: float) -> NQubitParams:
        j = np.full((n_qubits, n_qubits), float(J))
        np.fill_diagonal(j, 0.0)
        return cls(n_qubits, [B_x] * n_qubits, [B_z] * n_qubits, j)


def single_qubit_hamiltonian(p: QubitCircuitParams) -> HermitianOperator:
    """H = -(E_J/2) sx - E_ch (1 - 2 n_x) sz."""
    return HermitianOperator(-0.5 * p.E_J * PAULI_X - p.E_ch * (1.0 - 2.0 * p.n_x) * PAULI_Z)


def n_qubit_hamiltonian(p: NQubitParams) -> HermitianOperator:
    """H = 1/2 sum_i (B_x^i sx^i + B_z^i sz^i) + sum_{i<j} J^ij sy^i sy^j.

    Built in real arithmetic: sy (x) sy is a real matrix, so the whole
    operator is real symmetric and the propagator can use the real solver.
    """
    n = p.n_qubits
    if n > max_qubits():
        raise CapacityError(f"{n} qubits exceeds the configured maximum of {max_qubits()}")
    dim = 2**n
    h = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        bit = 1 << (n - 1 - i)
        if p.B_x[i]:
            h[idx, idx ^ bit] += 0.5 * p.B_x[i]
        if p.B_z[i]:
            h[idx, idx] += 0.5 * p.B_z[i] * np.where(idx & bit, -1.0, 1.0)
    for i in range(n):
        for j in range(i + 1, n):
            if not p.J[i, j]:
                continue
            bi, bj = 1 << (n - 1 - i), 1 << (n - 1 - j)
            # sy sy |b_i b_j> = -(-1)^(b_i + b_j) |~b_i ~b_j>
            same = ((idx & bi) > 0) == ((idx & bj) > 0)
            h[idx, idx ^ bi ^ bj] += p.J[i, j] * np.where(same, -1.0, 1.0)
    return HermitianOperator(h.astype(complex))


def n_qubit_hamiltonian_kron(p: NQubitParams) -> HermitianOperator:
    """Reference assembly by explicit Kronecker embeddings (slow, for checks)."""
    n = p.n_qubits
    if n > max_qubits():
        raise CapacityError(f"{n} qubits exceeds the configured maximum of {max_qubits()}")
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        h += 0.5 * (p.B_x[i] * embed(PAULI_X, i, n) + p.B_z[i] * embed(PAULI_Z, i, n))
    for i in range(n):
        for j in range(i + 1, n):
            h += p.J[i, j] * embed(PAULI_Y, i, n) @ embed(PAULI_Y, j, n)
    return HermitianOperator(h)


def two_qubit_hamiltonian(p: TwoQubitParams) -> HermitianOperator:
    """H = B (sx^1 + sx^2) + J sy^1 sy^2."""
    h = p.B * (np.kron(PAULI_X, np.eye(2)) + np.kron(np.eye(2), PAULI_X))
    h = h + p.J * np.kron(PAULI_Y, PAULI_Y)
    return HermitianOperator(h)
