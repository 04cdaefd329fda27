"""Q functions of two-qubit pure states on the Bloch sphere.

``Q_j(n)`` is the probability of finding qubit ``j`` in the reference state
after rotating it by ``g^dagger(n)``; ``Q_12(n1, n2)`` is the joint
probability of finding both qubits there.
"""
from __future__ import annotations

import numpy as np

from . import _backend
from .errors import UsageError
from .evolution import ZERO, BlochDirection, rotate_state, rotation_adjoints
from .linalg import PureState, inner, tensor


def _two_qubit(psi: PureState) -> np.ndarray:
    if psi.n_qubits != 2:
        raise UsageError("Q functions are defined here for two-qubit states")
    return psi.amps


def reduced_density_matrix(psi: PureState, which: int) -> np.ndarray:
    """2x2 reduced state of qubit ``which`` (1 or 2)."""
    a = _two_qubit(psi).reshape(2, 2)
    if which == 1:
        return a @ a.conj().T
    if which == 2:
        return a.T @ a.conj()
    raise UsageError(f"qubit index must be 1 or 2, got {which!r}")


def q_single(psi: PureState, which: int, n: BlochDirection = ZERO) -> float:
    """<n| rho_j |n>."""
    rho = reduced_density_matrix(psi, which)
    ket = n.ket().amps
    return float(np.vdot(ket, rho @ ket).real)


def q_single_projective(psi: PureState, which: int, n: BlochDirection = ZERO) -> float:
    """Same quantity by rotating the qubit and summing the |0>-outcome probabilities."""
    if which not in (1, 2):
        raise UsageError(f"qubit index must be 1 or 2, got {which!r}")
    n1, n2 = (n, ZERO) if which == 1 else (ZERO, n)
    p = np.abs(rotate_state(psi, n1, n2).amps) ** 2
    return float(p[0] + p[1]) if which == 1 else float(p[0] + p[2])


def q_joint(psi: PureState, n1: BlochDirection = ZERO, n2: BlochDirection = ZERO) -> float:
    """Probability of |00> after rotating each qubit by g^dagger(n_j)."""
    _two_qubit(psi)
    return float(abs(rotate_state(psi, n1, n2).amps[0]) ** 2)


def q_joint_overlap(psi: PureState, n1: BlochDirection, n2: BlochDirection) -> float:
    """|<n1|<n2|psi>|^2, the coherent-state overlap form."""
    _two_qubit(psi)
    return abs(inner(tensor(n1.ket(), n2.ket()), psi)) ** 2


def outcome_probabilities(psi: PureState, n1: BlochDirection, n2: BlochDirection) -> np.ndarray:
    """All four rotated-basis probabilities, ordered 00, 01, 10, 11."""
    return joint_probabilities(_two_qubit(psi), n1.theta, n1.phi, n2.theta, n2.phi)


def joint_probabilities(amps, theta1, phi1, theta2, phi2) -> np.ndarray:
    """Batched four-outcome probabilities.

    ``amps`` has shape ``(..., 4)``; the angles broadcast against its leading
    shape. Returns ``(..., 4)``. This is the hot path for sweeps and sampling.
    """
    amps = np.asarray(amps, dtype=complex)
    u1 = rotation_adjoints(theta1, phi1)
    u2 = rotation_adjoints(theta2, phi2)
    shape = np.broadcast_shapes(amps.shape[:-1], u1.shape[:-2], u2.shape[:-2])
    a = np.ascontiguousarray(np.broadcast_to(amps, shape + (4,))).reshape(-1, 4)
    u1 = np.ascontiguousarray(np.broadcast_to(u1, shape + (2, 2))).reshape(-1, 2, 2)
    u2 = np.ascontiguousarray(np.broadcast_to(u2, shape + (2, 2))).reshape(-1, 2, 2)
    return _backend.kernels.rotated_probs(a, u1, u2).reshape(shape + (4,))


def marginal_q(amps, which: int, theta, phi) -> np.ndarray:
    """Batched Q_j through explicit reduced density matrices."""
    a = np.asarray(amps, dtype=complex).reshape(np.shape(amps)[:-1] + (2, 2))
    if which == 1:
        rho = np.einsum("...ik,...jk->...ij", a, a.conj())
    elif which == 2:
        rho = np.einsum("...ki,...kj->...ij", a, a.conj())
    else:
        raise UsageError(f"qubit index must be 1 or 2, got {which!r}")
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    ket = np.stack(
        [np.cos(theta / 2) * np.exp(-0.5j * phi), -1j * np.sin(theta / 2) * np.exp(0.5j * phi)],
        axis=-1,
    )
    return np.einsum("...i,...ij,...j->...", ket.conj(), rho, ket).real


def rotated_amplitudes(amps, theta1, phi1, theta2, phi2) -> np.ndarray:
    """Batched g^dagger(n1) (x) g^dagger(n2) applied to ``(..., 4)`` amplitudes."""
    amps = np.asarray(amps, dtype=complex)
    u1 = rotation_adjoints(theta1, phi1)
    u2 = rotation_adjoints(theta2, phi2)
    shape = np.broadcast_shapes(amps.shape[:-1], u1.shape[:-2], u2.shape[:-2])
    a = np.ascontiguousarray(np.broadcast_to(amps, shape + (4,))).reshape(-1, 4)
    u1 = np.ascontiguousarray(np.broadcast_to(u1, shape + (2, 2))).reshape(-1, 2, 2)
    u2 = np.ascontiguousarray(np.broadcast_to(u2, shape + (2, 2))).reshape(-1, 2, 2)
    return _backend.kernels.rotate_pairs(a, u1, u2).reshape(shape + (4,))
