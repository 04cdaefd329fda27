"""CHSH combination built from Q functions, plus the closed-form expression."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import chunk_bounds, ordered_map
from .errors import UsageError
from .evolution import ZERO, BlochDirection, closed_form_amplitudes, sin_over
from .linalg import PureState
from .model import TwoQubitParams
from .phase_space import joint_probabilities, marginal_q, q_joint, q_single

COMPONENT_NAMES = ("q00", "qn0", "q0n", "qnn", "q1", "q2")
SIGNS = np.array([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class ChshSetting:
    n: BlochDirection
    n_prime: BlochDirection


@dataclass(frozen=True)
class ChshResult:
    gamma: float
    components: tuple

    @property
    def violated_low(self) -> bool:
        return self.gamma < -1.0

    @property
    def violated_high(self) -> bool:
        return self.gamma > 0.0

    @property
    def violated(self) -> bool:
        return self.violated_low or self.violated_high

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, **dict(zip(COMPONENT_NAMES, self.components))}


def chsh_gamma(psi: PureState, s: ChshSetting) -> ChshResult:
    """Gamma = Q12(0,0) + Q12(n,0) + Q12(0,n') - Q12(n,n') - Q1(0) - Q2(0)."""
    comps = (
        q_joint(psi, ZERO, ZERO),
        q_joint(psi, s.n, ZERO),
        q_joint(psi, ZERO, s.n_prime),
        q_joint(psi, s.n, s.n_prime),
        q_single(psi, 1, ZERO),
        q_single(psi, 2, ZERO),
    )
    return ChshResult(float(np.dot(SIGNS, comps)), comps)


def gamma_components(amps, theta1, phi1, theta2, phi2) -> np.ndarray:
    """Batched version of :func:`chsh_gamma`; returns ``(..., 6)`` components.

    Setting ``n = (theta1, phi1)`` acts on qubit 1 and ``n' = (theta2, phi2)``
    on qubit 2; all arguments broadcast.
    """
    amps = np.asarray(amps, dtype=complex)
    shape = np.broadcast_shapes(
        amps.shape[:-1], *(np.shape(x) for x in (theta1, phi1, theta2, phi2))
    )
    out = np.empty(shape + (6,))
    out[..., 0] = joint_probabilities(amps, 0.0, 0.0, 0.0, 0.0)[..., 0]
    out[..., 1] = joint_probabilities(amps, theta1, phi1, 0.0, 0.0)[..., 0]
    out[..., 2] = joint_probabilities(amps, 0.0, 0.0, theta2, phi2)[..., 0]
    out[..., 3] = joint_probabilities(amps, theta1, phi1, theta2, phi2)[..., 0]
    out[..., 4] = marginal_q(amps, 1, 0.0, 0.0)
    out[..., 5] = marginal_q(amps, 2, 0.0, 0.0)
    return out


def gamma_from_components(comps) -> np.ndarray:
    c = np.asarray(comps)
    return ((c[..., 0] + c[..., 1]) + c[..., 2]) - c[..., 3] - c[..., 4] - c[..., 5]


def chsh_gamma_terms(p: TwoQubitParams, t, theta, phi1, phi2) -> dict:
    """Individual terms of the closed-form Gamma for the evolved |00> state.

    Keys name the terms of the uncorrected expression; ``population_imbalance``
    is the pair ``cos(at)cos(Jt) - (J/a) sin(at) sin(Jt)`` which equals
    P(00) - P(11) of the unrotated state.
    """
    B, J, a = p.B, p.J, p.alpha
    t, theta, phi1, phi2 = (np.asarray(x, dtype=float) for x in (t, theta, phi1, phi2))
    c_at = np.cos(a * t)
    # (J/alpha) sin(alpha t) and (B/alpha) sin(alpha t), finite as alpha -> 0
    j_s = J * sin_over(a, t)
    b_s = B * sin_over(a, t)
    s_jt, c_jt = np.sin(J * t), np.cos(J * t)
    sh4 = np.sin(theta / 2) ** 4
    st = np.sin(theta)
    return {
        "local": -sh4,
        "population_imbalance": c_at * c_jt - j_s * s_jt,
        "phase_sum": 0.25 * (c_at * s_jt + j_s * c_jt) * st**2 * np.sin(phi1 + phi2),
        "field_quadratic": -(b_s**2) * (2.0 - 4.0 * sh4 + st**2 * np.cos(phi1) * np.cos(phi2)),
        "field_linear": b_s
        * st
        * np.sin(theta / 2) ** 2
        * (s_jt * (np.sin(phi1) + np.sin(phi2)) + c_at * (np.cos(phi1) + np.cos(phi2))),
    }


def chsh_gamma_analytic_uncorrected(p: TwoQubitParams, t, theta, phi1, phi2):
    """Closed form with the ``population_imbalance`` pair left in.

    It does not agree with the Q-function route: it exceeds it by exactly
    that pair. Kept for diagnostics.
    """
    terms = chsh_gamma_terms(p, t, theta, phi1, phi2)
    return sum(terms.values())


def chsh_gamma_analytic(p: TwoQubitParams, t, theta, phi1, phi2):
    """Closed-form Gamma for theta1 = theta2 = theta, corrected.

    Equal to the uncorrected expression minus the ``population_imbalance`` pair,
    which the term-by-term derivation from the Q functions does not produce.
    """
    terms = chsh_gamma_terms(p, t, theta, phi1, phi2)
    del terms["population_imbalance"]
    return sum(terms.values())


def analytic_discrepancy(p: TwoQubitParams, t):
    """Uncorrected minus corrected closed form; independent of the angles."""
    return chsh_gamma_terms(p, t, 0.0, 0.0, 0.0)["population_imbalance"]


@dataclass(frozen=True)
class GammaSweep:
    """Gamma on a (t, theta) grid, t-major. ``t`` holds the values as supplied."""

    params: TwoQubitParams
    t: np.ndarray
    theta: np.ndarray
    phi1: float
    phi2: float
    components: np.ndarray  # (len(t), len(theta), 6)

    @property
    def gamma(self) -> np.ndarray:
        return gamma_from_components(self.components)

    def result(self, i: int, j: int) -> ChshResult:
        c = tuple(float(x) for x in self.components[i, j])
        return ChshResult(float(self.gamma[i, j]), c)

    def rows(self):
        g = self.gamma
        for i, t in enumerate(self.t):
            for j, th in enumerate(self.theta):
                yield (float(t), float(th), float(g[i, j]), *map(float, self.components[i, j]))


def physical_times(p: TwoQubitParams, t_grid, time_unit: str = "alpha") -> np.ndarray:
    """Convert a time grid given in units of 1/alpha (default) to raw time."""
    t = np.asarray(t_grid, dtype=float)
    if time_unit == "raw":
        return t
    if time_unit != "alpha":
        raise UsageError(f"unknown time unit {time_unit!r}")
    if p.alpha == 0:
        raise UsageError("time in units of 1/alpha is undefined for B = J = 0")
    return t / p.alpha


def sweep_gamma(
    p: TwoQubitParams,
    t_grid,
    theta_grid,
    phi1: float = 0.0,
    phi2: float = 0.0,
    *,
    time_unit: str = "alpha",
    workers: int | None = None,
) -> GammaSweep:
    """Gamma with n = (theta, phi1), n' = (theta, phi2) over the grid."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if t_grid.size == 0 or theta_grid.size == 0:
        raise UsageError("sweep grids must be non-empty")
    times = physical_times(p, t_grid, time_unit)
    amps = closed_form_amplitudes(p.B, p.J, times)

    def block(bounds):
        lo, hi = bounds
        a = amps[lo:hi, None, :]
        return gamma_components(a, theta_grid, phi1, theta_grid, phi2)

    parts = ordered_map(block, chunk_bounds(len(times)), workers)
    return GammaSweep(p, t_grid, theta_grid, float(phi1), float(phi2), np.concatenate(parts))
