"""Concurrence and entanglement of formation of two-qubit pure states.

Three routes are provided and cross-checked in the tests:

* ``concurrence_direct``: from the amplitudes, C^2 = 4|a0 a3 - a1 a2|^2;
* ``concurrence_analytic``: closed form for the evolved |00> state;
* ``concurrence_protocol``: from eight measurable probabilities, with the
  internal phase angles called chi_A and chi_B.

The protocol recovers |chi_A| and |chi_B| through arccos, which loses their
signs. A ``branch`` string picks the signs: ``"++"``, ``"+-"``, ``"-+"``,
``"--"``, or ``"resolved"``, which reads the sines from two extra
probabilities measured with qubit 2 along +y.
"""
from __future__ import annotations

import math
import threading
from dataclasses import asdict, dataclass, fields

import numpy as np

from ._parallel import chunk_bounds, ordered_map
from .chsh import physical_times
from .errors import InconsistentProbabilitiesError, UsageError
from .evolution import BlochDirection, closed_form_amplitudes, sin_over
from .linalg import PAULI_Y, PureState
from .model import TwoQubitParams
from .phase_space import joint_probabilities, q_joint, rotated_amplitudes

ZERO_DIR = BlochDirection(0.0, 0.0)
N_A = BlochDirection(math.pi, 0.0)
N_B = BlochDirection(math.pi / 2, math.pi / 2)
N_C = BlochDirection(math.pi / 2, -math.pi / 2)
N_Y = BlochDirection(math.pi / 2, math.pi)

BRANCHES = ("++", "+-", "-+", "--")
ALL_BRANCHES = BRANCHES + ("resolved",)

C2_SLACK = 1e-9
COS_SLACK = 1e-9
ANGLE_FLOOR = 1e-14
SUM_TOL = 1e-10

# (field, direction on qubit 1, direction on qubit 2)
PROBABILITY_SETTINGS = (
    ("p0", ZERO_DIR, ZERO_DIR),
    ("p1", ZERO_DIR, N_A),
    ("p2", N_A, ZERO_DIR),
    ("p3", N_A, N_A),
    ("ppp", ZERO_DIR, N_B),
    ("ppm", ZERO_DIR, N_C),
    ("pmp", N_A, N_B),
    ("pmm", N_A, N_C),
    ("ppy", ZERO_DIR, N_Y),
    ("pmy", N_A, N_Y),
)
PROB_FIELDS = tuple(name for name, _, _ in PROBABILITY_SETTINGS)


class _Counter:
    def __init__(self):
        self._n = 0
        self._lock = threading.Lock()

    def bump(self, k: int = 1):
        with self._lock:
            self._n += k

    @property
    def value(self) -> int:
        return self._n


clamp_events = _Counter()


def _clamp_c2(value: float, clamp: bool = True) -> tuple[float, bool]:
    if value < -C2_SLACK or value > 1.0 + C2_SLACK:
        raise InconsistentProbabilitiesError(f"C^2 = {value!r} is outside [0, 1]")
    if clamp and (value < 0.0 or value > 1.0):
        clamp_events.bump()
        return min(max(value, 0.0), 1.0), True
    return value, False


@dataclass(frozen=True)
class ProbabilitySet:
    """Outcome probabilities under sz(x)sz (p0..p3) and sz(x)sx (ppp..pmm).

    ``ppy`` and ``pmy`` are the optional sz(x)sy probabilities for qubit 2
    found along +y with qubit 1 in |0> and |1>; only the ``"resolved"``
    branch needs them.
    """

    p0: float
    p1: float
    p2: float
    p3: float
    ppp: float
    ppm: float
    pmp: float
    pmm: float
    ppy: float | None = None
    pmy: float | None = None

    def __post_init__(self):
        vals = [getattr(self, f.name) for f in fields(self)]
        for f, v in zip(fields(self), vals):
            if v is not None and not (-SUM_TOL <= v <= 1.0 + SUM_TOL):
                raise UsageError(f"{f.name} = {v!r} is not a probability")
        if abs(self.p0 + self.p1 + self.p2 + self.p3 - 1.0) > SUM_TOL:
            raise UsageError("p0 + p1 + p2 + p3 must equal 1")
        if abs(self.ppp + self.ppm + self.pmp + self.pmm - 1.0) > SUM_TOL:
            raise UsageError("ppp + ppm + pmp + pmm must equal 1")

    @classmethod
    def from_array(cls, arr) -> ProbabilitySet:
        return cls(*(float(x) for x in arr))

    def as_array(self) -> np.ndarray:
        return np.array(
            [np.nan if v is None else v for v in asdict(self).values()], dtype=float
        )

    @property
    def has_sign_data(self) -> bool:
        return self.ppy is not None and self.pmy is not None


@dataclass(frozen=True)
class ConcurrenceResult:
    c_squared: float
    route: str
    branch: str | None = None
    clamped: bool = False
    chi_a: float | None = None
    chi_b: float | None = None

    @property
    def concurrence(self) -> float:
        return math.sqrt(max(self.c_squared, 0.0))

    @property
    def entanglement(self) -> float:
        return entanglement_of_formation(min(max(self.c_squared, 0.0), 1.0))


def _binary_entropy(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.where((x <= 0) | (x >= 1), 0.0, h)


def entanglement_of_formation(c_squared):
    """Binary entropy of (1 + sqrt(1 - C^2)) / 2; scalar in, scalar out."""
    c2 = np.asarray(c_squared, dtype=float)
    if np.any(c2 < -C2_SLACK) or np.any(c2 > 1 + C2_SLACK) or np.any(np.isnan(c2)):
        raise UsageError("C^2 must lie in [0, 1]")
    c2 = np.clip(c2, 0.0, 1.0)
    e = _binary_entropy((1.0 + np.sqrt(1.0 - c2)) / 2.0)
    return float(e) if e.ndim == 0 else e


def _require_two(psi: PureState) -> np.ndarray:
    if psi.n_qubits != 2:
        raise UsageError("concurrence is implemented for two-qubit pure states")
    return psi.amps


def concurrence_direct(psi: PureState) -> ConcurrenceResult:
    a = _require_two(psi)
    c2 = 4.0 * abs(a[0] * a[3] - a[1] * a[2]) ** 2
    c2, clamped = _clamp_c2(c2)
    return ConcurrenceResult(c2, "direct", clamped=clamped)


def concurrence_spin_flip(psi: PureState) -> float:
    """|<psi| sy(x)sy |psi*>|^2, the spin-flip form of the same quantity."""
    a = _require_two(psi)
    return float(abs(np.vdot(a, np.kron(PAULI_Y, PAULI_Y) @ a.conj())) ** 2)


def concurrence_squared_direct(amps) -> np.ndarray:
    a = np.asarray(amps)
    return 4.0 * np.abs(a[..., 0] * a[..., 3] - a[..., 1] * a[..., 2]) ** 2


def concurrence_squared_analytic(B, J, t):
    """Closed-form C^2(t) for the evolved |00> state, vectorised."""
    B, J, t = (np.asarray(x, dtype=float) for x in (B, J, t))
    a = np.hypot(2 * B, J)
    js = J * sin_over(a, t)  # (J/alpha) sin(alpha t)
    js2 = J * sin_over(a, 2 * t)  # (J/alpha) sin(2 alpha t)
    s_jt = np.sin(J * t)
    return (
        js**4
        + 0.25 * (js2**2 - 8.0 * js**2 * s_jt**2)
        + 0.5 * js2 * np.sin(2 * J * t)
        + s_jt**2
    )


def concurrence_analytic(p: TwoQubitParams, t: float) -> ConcurrenceResult:
    c2, clamped = _clamp_c2(float(concurrence_squared_analytic(p.B, p.J, t)))
    return ConcurrenceResult(c2, "analytic", clamped=clamped)


def probabilities_from_state(psi: PureState) -> ProbabilitySet:
    """Every protocol probability as a joint Q function at the fixed directions."""
    _require_two(psi)
    return ProbabilitySet(*(q_joint(psi, n1, n2) for _, n1, n2 in PROBABILITY_SETTINGS))


def probability_array(amps) -> np.ndarray:
    """Batched :func:`probabilities_from_state`; returns ``(..., 10)`` in PROB_FIELDS order."""
    amps = np.asarray(amps, dtype=complex)
    out = np.empty(amps.shape[:-1] + (len(PROBABILITY_SETTINGS),))
    for k, (_, n1, n2) in enumerate(PROBABILITY_SETTINGS):
        out[..., k] = joint_probabilities(amps, n1.theta, n1.phi, n2.theta, n2.phi)[..., 0]
    return out


def _branch_signs(branch: str) -> tuple[int, int]:
    if branch not in BRANCHES:
        raise UsageError(f"unknown branch {branch!r}; expected one of {ALL_BRANCHES}")
    return (1 if branch[0] == "+" else -1), (1 if branch[1] == "+" else -1)


def cos_excursions(P) -> np.ndarray:
    """Rows whose implied |cos chi_A| or |cos chi_B| exceeds 1 beyond the slack."""
    return _protocol_parts(P, "++", strict=False)[3]


def _protocol_parts(P, branch: str, strict: bool = True):
    """Cross-term ingredients for stacked probability rows ``P[..., 10]``.

    Returns ``(c2, cos_a, cos_b, bad)``. With ``strict`` an excursion of
    either cosine raises; otherwise the rows are projected back onto the
    feasible range and flagged in ``bad`` (sampled frequencies do this). The cross term is evaluated as
    sqrt(P0P1P2P3) cos(chi_A + chi_B) = x_a x_b - s_a s_b y_a y_b with
    x = sqrt(..) cos chi and y = sqrt(..) |sin chi|, which is the same
    expression without the 0/0 at vanishing probabilities.
    """
    p0, p1, p2, p3, ppp, _, pmp, _, ppy, pmy = np.moveaxis(np.asarray(P, dtype=float), -1, 0)
    n01 = np.sqrt(np.maximum(p0 * p1, 0.0))
    n23 = np.sqrt(np.maximum(p2 * p3, 0.0))
    x_a = (2 * ppp - p0 - p1) / 2
    x_b = (2 * pmp + p0 + p1 - 1) / 2
    ok_a = p0 * p1 >= ANGLE_FLOOR
    ok_b = p2 * p3 >= ANGLE_FLOOR
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_a = np.where(ok_a, x_a / np.where(ok_a, n01, 1.0), np.nan)
        cos_b = np.where(ok_b, x_b / np.where(ok_b, n23, 1.0), np.nan)
    bad = (np.abs(np.nan_to_num(cos_a)) > 1 + COS_SLACK) | (
        np.abs(np.nan_to_num(cos_b)) > 1 + COS_SLACK
    )
    if strict and np.any(bad):
        raise InconsistentProbabilitiesError(
            "cos(chi_A) or cos(chi_B) falls outside [-1, 1]; the probabilities do "
            "not come from one pure state"
        )
    x_a = np.clip(x_a, -n01, n01)
    x_b = np.clip(x_b, -n23, n23)
    if branch == "resolved":
        if np.any(np.isnan(ppy)) or np.any(np.isnan(pmy)):
            raise UsageError("the resolved branch needs ppy and pmy")
        # chi_A = arg a0 - arg a1 and chi_B = arg a3 - arg a2, so the sines are
        # Im(a0 a1*) and -Im(a2 a3*)
        y_a = (p0 + p1) / 2 - ppy
        y_b = -((p2 + p3) / 2 - pmy)
        cross = x_a * x_b - y_a * y_b
    else:
        s_a, s_b = _branch_signs(branch)
        y_a = np.sqrt(np.maximum(n01**2 - x_a**2, 0.0))
        y_b = np.sqrt(np.maximum(n23**2 - x_b**2, 0.0))
        cross = x_a * x_b - s_a * s_b * y_a * y_b
    c2 = 4.0 * (p1 * p2 + p0 * p3 - 2.0 * cross)
    return c2, cos_a, cos_b, bad


def concurrence_protocol(
    ps: ProbabilitySet, branch: str = "++", *, clamp: bool = True, strict: bool = True
) -> ConcurrenceResult:
    """C^2 = 4[P1 P2 + P0 P3 - 2 sqrt(P0 P1 P2 P3) cos(chi_A + chi_B)].

    cos chi_A = (2 P++ - P0 - P1) / (2 sqrt(P0 P1)) and
    cos chi_B = (2 P-+ + P0 + P1 - 1) / (2 sqrt(P2 P3)). With ``clamp=False``
    the raw statistic is returned (estimators need it unbiased by clipping).
    Cosines beyond the 1e-9 slack raise unless ``strict=False``, in which case
    they are projected onto [-1, 1].
    """
    if branch not in ALL_BRANCHES:
        raise UsageError(f"unknown branch {branch!r}; expected one of {ALL_BRANCHES}")
    c2, cos_a, cos_b, _ = _protocol_parts(ps.as_array(), branch, strict)
    c2, clamped = _clamp_c2(float(c2), clamp)
    chi_a = None if np.isnan(cos_a) else math.acos(min(max(float(cos_a), -1.0), 1.0))
    chi_b = None if np.isnan(cos_b) else math.acos(min(max(float(cos_b), -1.0), 1.0))
    if branch != "resolved":
        s_a, s_b = _branch_signs(branch)
        chi_a = None if chi_a is None else s_a * chi_a
        chi_b = None if chi_b is None else s_b * chi_b
    return ConcurrenceResult(c2, "protocol", branch, clamped, chi_a, chi_b)


def concurrence_protocol_array(P, branch: str = "resolved") -> np.ndarray:
    """Vectorised protocol C^2 (unclamped) over stacked probability rows."""
    if branch not in ALL_BRANCHES:
        raise UsageError(f"unknown branch {branch!r}; expected one of {ALL_BRANCHES}")
    c2 = _protocol_parts(P, branch)[0]
    if np.any(c2 < -C2_SLACK) or np.any(c2 > 1 + C2_SLACK):
        raise InconsistentProbabilitiesError("protocol C^2 outside [0, 1]")
    return c2


def family_branch(p: TwoQubitParams, t: float) -> str:
    """Branch that reproduces C^2 for the evolved |00> state.

    Found by calibration and explained by the structure of that state: the
    principal branch is right exactly when |cos(alpha t)| >= |cos(J t)|.
    """
    return "++" if abs(math.cos(p.alpha * t)) >= abs(math.cos(p.J * t)) else "+-"


@dataclass(frozen=True)
class BranchCalibration:
    """Which fixed sign branches reproduce a reference C^2, point by point."""

    matches: np.ndarray  # (n_points, 4) bool, columns in BRANCHES order
    tol: float

    @property
    def match_fraction(self) -> dict:
        return {b: float(self.matches[:, k].mean()) for k, b in enumerate(BRANCHES)}

    @property
    def selected(self) -> str:
        """Branch matching the most points (first in BRANCHES order on ties)."""
        return BRANCHES[int(np.argmax(self.matches.sum(axis=0)))]

    @property
    def universal(self) -> bool:
        """True when one fixed branch works at every point."""
        return bool(self.matches.all(axis=0).any())

    def per_point(self) -> list[str | None]:
        """First matching branch at each point, or None if none matches."""
        out = []
        for row in self.matches:
            hit = np.flatnonzero(row)
            out.append(BRANCHES[hit[0]] if hit.size else None)
        return out


def calibrate_branch(prob_rows, reference_c2, tol: float = 1e-9) -> BranchCalibration:
    """Brute-force the four sign branches against reference C^2 values."""
    P = np.atleast_2d(np.asarray(prob_rows, dtype=float))
    ref = np.atleast_1d(np.asarray(reference_c2, dtype=float))
    if P.shape[0] != ref.shape[0]:
        raise UsageError("need one reference value per probability row")
    matches = np.stack(
        [np.abs(_protocol_parts(P, b)[0] - ref) <= tol for b in BRANCHES], axis=1
    )
    return BranchCalibration(matches, tol)


@dataclass(frozen=True)
class EntanglementSweep:
    """Concurrence of the locally rotated evolved state on a (t, theta) grid."""

    params: TwoQubitParams
    t: np.ndarray
    theta: np.ndarray
    branch: str
    c2_direct: np.ndarray
    c2_analytic: np.ndarray
    c2_protocol: np.ndarray

    @property
    def entanglement(self) -> np.ndarray:
        return entanglement_of_formation(np.clip(self.c2_protocol, 0.0, 1.0))

    def rows(self):
        e = self.entanglement
        for i, t in enumerate(self.t):
            for j, th in enumerate(self.theta):
                yield (
                    float(t),
                    float(th),
                    float(self.c2_direct[i, j]),
                    float(self.c2_analytic[i, j]),
                    float(self.c2_protocol[i, j]),
                    float(e[i, j]),
                )


def sweep_entanglement(
    p: TwoQubitParams,
    t_grid,
    theta_grid,
    phi1: float = 0.0,
    phi2: float = 0.0,
    *,
    branch: str = "resolved",
    time_unit: str = "alpha",
    workers: int | None = None,
) -> EntanglementSweep:
    """Rotate the evolved state by n1 = (theta, phi1), n2 = (theta, phi2), then measure."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    if t_grid.size == 0 or theta_grid.size == 0:
        raise UsageError("sweep grids must be non-empty")
    times = physical_times(p, t_grid, time_unit)
    amps = closed_form_amplitudes(p.B, p.J, times)

    def block(bounds):
        lo, hi = bounds
        rot = rotated_amplitudes(amps[lo:hi, None, :], theta_grid, phi1, theta_grid, phi2)
        direct = concurrence_squared_direct(rot)
        protocol = concurrence_protocol_array(probability_array(rot), branch)
        return direct, protocol

    parts = ordered_map(block, chunk_bounds(len(times)), workers)
    direct = np.concatenate([d for d, _ in parts])
    protocol = np.concatenate([q for _, q in parts])
    analytic = np.broadcast_to(
        concurrence_squared_analytic(p.B, p.J, times)[:, None], direct.shape
    ).copy()
    return EntanglementSweep(p, t_grid, theta_grid, branch, direct, analytic, protocol)
