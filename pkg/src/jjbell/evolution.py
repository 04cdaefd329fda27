"""Two-qubit dynamics, single-qubit gates and Bloch-direction rotations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .linalg import (
    HermitianOperator,
    PureState,
    UnitaryOperator,
    spectral,
)
from .model import TwoQubitParams

SMALL_ALPHA = 1e-8


def sin_over(alpha, t):
    """sin(alpha * t) / alpha, continuous through alpha = 0."""
    alpha = np.asarray(alpha, dtype=float)
    t = np.asarray(t, dtype=float)
    x = alpha * t
    small = np.abs(alpha) < SMALL_ALPHA
    safe = np.where(small, 1.0, alpha)
    series = t * (1.0 - x * x / 6.0)
    return np.where(small, series, np.sin(x) / safe)


@dataclass(frozen=True)
class BlochDirection:
    """Polar angle ``theta`` and azimuth ``phi`` (radians, stored unwrapped)."""

    theta: float = 0.0
    phi: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def state_vector(self) -> np.ndarray:
        """Bloch vector of ``ket()``.

        U_x rotates |0> towards -y, so this is ``vector`` turned by -pi/2
        about z: (sin th sin ph, -sin th cos ph, cos th).
        """
        st = math.sin(self.theta)
        return np.array([st * math.sin(self.phi), -st * math.cos(self.phi), math.cos(self.theta)])

    def ket(self) -> PureState:
        """|n> = g(n)|0> = cos(theta/2) e^{-i phi/2}|0> - i sin(theta/2) e^{i phi/2}|1>."""
        c, s = math.cos(self.theta / 2), math.sin(self.theta / 2)
        return PureState(
            [c * np.exp(-0.5j * self.phi), -1j * s * np.exp(0.5j * self.phi)]
        )


ZERO = BlochDirection(0.0, 0.0)


@dataclass(frozen=True)
class BellCondition:
    """Resonance t = n pi / alpha, J = (m + 1/2) alpha / n giving a maximally entangled state."""

    m: int
    n: int

    def __post_init__(self):
        if self.n == 0:
            raise UsageError("n must be nonzero")
        if self.n**2 <= (self.m + 0.5) ** 2:
            raise UsageError(
                f"J = (m+1/2) alpha / n has no real solution for m={self.m}, n={self.n}"
            )

    def params(self, B: float) -> tuple[TwoQubitParams, float]:
        """Coupling J and time t realising the condition for a given field B."""
        k = (self.m + 0.5) / self.n
        J = 2.0 * abs(B) * k / math.sqrt(1.0 - k * k)
        p = TwoQubitParams(B, J)
        return p, self.n * math.pi / p.alpha

    def target_state(self) -> PureState:
        a0 = ((-1) ** self.n - 1j * (-1) ** self.m) / 2
        a3 = ((-1) ** self.n + 1j * (-1) ** self.m) / 2
        return PureState([a0, 0, 0, a3])


def closed_form_amplitudes(B, J, t) -> np.ndarray:
    """Vectorised amplitudes of e^{-iHt}|00>; broadcasting over B, J, t.

    Returns an array of shape ``broadcast_shape + (4,)``.
    """
    B, J, t = np.broadcast_arrays(
        np.asarray(B, dtype=float), np.asarray(J, dtype=float), np.asarray(t, dtype=float)
    )
    alpha = np.hypot(2.0 * B, J)
    ejt = np.exp(-1j * J * t)
    literal = alpha >= SMALL_ALPHA
    safe = np.where(literal, alpha, 1.0)
    wave = np.where(
        literal,
        (safe - J) / (4 * safe) * np.exp(-1j * alpha * t)
        + (safe + J) / (4 * safe) * np.exp(1j * alpha * t),
        0.5 * np.cos(alpha * t) + 0.5j * J * sin_over(alpha, t),
    )
    mixed = np.where(literal, -1j * B / safe * np.sin(alpha * t), -1j * B * sin_over(alpha, t))
    out = np.empty(B.shape + (4,), dtype=complex)
    out[..., 0] = 0.5 * ejt + wave
    out[..., 1] = mixed
    out[..., 2] = mixed
    out[..., 3] = -0.5 * ejt + wave
    return out


def evolve_closed_form(p: TwoQubitParams, t: float) -> PureState:
    """State at time ``t`` starting from |00> under H = B(sx+sx) + J sy sy."""
    return PureState(closed_form_amplitudes(p.B, p.J, t))


def gate_uz(theta_z: float) -> UnitaryOperator:
    """exp(-i theta_z sz / 2)."""
    return UnitaryOperator(np.diag([np.exp(-0.5j * theta_z), np.exp(0.5j * theta_z)]))


def gate_ux(theta_x: float) -> UnitaryOperator:
    """exp(-i theta_x sx / 2)."""
    c, s = math.cos(theta_x / 2), math.sin(theta_x / 2)
    return UnitaryOperator([[c, -1j * s], [-1j * s, c]])


def bloch_rotation(n: BlochDirection) -> UnitaryOperator:
    """g(n) = U_z(phi) U_x(theta); it maps |0> to |n>."""
    return gate_uz(n.phi) @ gate_ux(n.theta)


def rotation_adjoints(theta, phi) -> np.ndarray:
    """Batched g(n)^dagger for arrays of angles, shape ``(..., 2, 2)``."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    ep = np.exp(0.5j * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    # g = [[c e^{-i phi/2}, -i s e^{-i phi/2}], [-i s e^{i phi/2}, c e^{i phi/2}]]
    out[..., 0, 0] = c * ep
    out[..., 0, 1] = 1j * s / ep
    out[..., 1, 0] = 1j * s * ep
    out[..., 1, 1] = c / ep
    return out


def rotate_state(psi: PureState, n1: BlochDirection, n2: BlochDirection) -> PureState:
    """Apply g^dagger(n1) (x) g^dagger(n2)."""
    if psi.n_qubits != 2:
        raise UsageError("rotate_state needs a two-qubit state")
    u1 = bloch_rotation(n1).adjoint().matrix
    u2 = bloch_rotation(n2).adjoint().matrix
    out = np.einsum("ab,cd,bd->ac", u1, u2, psi.amps.reshape(2, 2)).reshape(4)
    return PureState(out / np.linalg.norm(out))


def propagate_dense(h: HermitianOperator, psi0: PureState, t: float) -> PureState:
    """e^{-iHt}|psi0> through a cached eigendecomposition of ``h``."""
    amps = spectral(h).evolve(psi0, [t])[0]
    return PureState(amps / np.linalg.norm(amps))


def propagate_many(h: HermitianOperator, psi0: PureState, times) -> np.ndarray:
    """Amplitudes for every time in ``times`` from a single eigendecomposition."""
    return spectral(h).evolve(psi0, times)
