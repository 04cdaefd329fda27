"""Finite-shot readout of two charge qubits.

Every trial is recorded; there is no code path that drops an outcome. Each
(setting, block of trials) gets its own generator seeded from
``(master seed, hash(setting_id), block)``, so results do not depend on how
settings are scheduled across workers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._parallel import ordered_map
from .chsh import SIGNS, ChshSetting
from .entanglement import (
    N_B,
    N_Y,
    PROB_FIELDS,
    ProbabilitySet,
    _protocol_parts,
    concurrence_protocol,
    cos_excursions,
)
from .errors import UsageError
from .evolution import ZERO, BlochDirection
from .linalg import PureState
from .phase_space import outcome_probabilities

OUTCOMES = ("00", "01", "10", "11")
BLOCK_SIZE = 1 << 16
DEFAULT_RESAMPLES = 200


def setting_key(setting_id: str) -> int:
    return int.from_bytes(hashlib.sha256(setting_id.encode()).digest()[:8], "little")


def child_generator(seed: int, setting_id: str, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), setting_key(setting_id), int(block)])
    return np.random.Generator(np.random.PCG64(ss))


def default_setting_id(n1: BlochDirection, n2: BlochDirection) -> str:
    f = lambda x: format(x, ".17g")  # noqa: E731
    return f"({f(n1.theta)},{f(n1.phi)})x({f(n2.theta)},{f(n2.phi)})"


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    setting_id: str
    outcome: str
    seed_path: str


@dataclass(frozen=True)
class TrialLog:
    """All trials of one setting, stored column-wise."""

    setting_id: str
    seed: int
    outcomes: np.ndarray  # uint8 codes 0..3, qubit 1 is the high bit
    block_size: int = BLOCK_SIZE

    def __len__(self):
        return self.outcomes.size

    def seed_path(self, trial_index: int) -> str:
        return f"{self.seed}/{self.setting_id}/{trial_index // self.block_size}"

    def records(self):
        for i, code in enumerate(self.outcomes):
            yield TrialRecord(i, self.setting_id, OUTCOMES[code], self.seed_path(i))

    def counts(self) -> np.ndarray:
        return np.bincount(self.outcomes, minlength=4)

    def frequencies(self) -> np.ndarray:
        return self.counts() / len(self)


def sample_setting(
    psi: PureState,
    n1: BlochDirection,
    n2: BlochDirection,
    shots: int,
    seed: int,
    *,
    setting_id: str | None = None,
    epsilon: float = 0.0,
) -> TrialLog:
    """Projective readout of both qubits after rotating them by g^dagger(n_j).

    ``epsilon`` is an independent classical bit-flip probability applied to
    each qubit's recorded outcome.
    """
    if shots < 1:
        raise UsageError("shots must be at least 1")
    if not 0.0 <= epsilon <= 1.0:
        raise UsageError("epsilon must lie in [0, 1]")
    setting_id = default_setting_id(n1, n2) if setting_id is None else setting_id
    probs = outcome_probabilities(psi, n1, n2)
    cdf = np.cumsum(probs / probs.sum())
    out = np.empty(shots, dtype=np.uint8)
    for block, lo in enumerate(range(0, shots, BLOCK_SIZE)):
        hi = min(lo + BLOCK_SIZE, shots)
        rng = child_generator(seed, setting_id, block)
        codes = _backend.kernels.draw_outcomes(cdf, rng.random(hi - lo))
        if epsilon > 0:
            flips = rng.random((2, hi - lo)) < epsilon
            codes = codes ^ (flips[0].astype(np.uint8) << 1) ^ flips[1].astype(np.uint8)
        out[lo:hi] = codes
    return TrialLog(setting_id, int(seed), out)


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    std_error: float
    shots: int
    components: dict = field(default_factory=dict)
    logs: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.shots < 1:
            raise UsageError("shots must be positive")


def binomial_se(p_hat: float, shots: int) -> float:
    return math.sqrt(max(p_hat * (1 - p_hat), 0.0) / shots)


GAMMA_SETTINGS = ("q00", "qn0", "q0n", "qnn", "q1", "q2")


def estimate_gamma(
    psi: PureState,
    s: ChshSetting,
    shots_per_setting: int,
    seed: int,
    *,
    epsilon: float = 0.0,
    workers: int | None = 1,
) -> EstimateWithError:
    """Gamma from six independently sampled settings.

    Four joint settings give the Q12 terms; two z-basis runs give the
    marginals Q1(0) and Q2(0). The standard error adds the binomial errors of
    the six frequencies in quadrature.
    """
    plan = {
        "q00": (ZERO, ZERO, (0,)),
        "qn0": (s.n, ZERO, (0,)),
        "q0n": (ZERO, s.n_prime, (0,)),
        "qnn": (s.n, s.n_prime, (0,)),
        "q1": (ZERO, ZERO, (0, 1)),
        "q2": (ZERO, ZERO, (0, 2)),
    }

    def run(name):
        n1, n2, _ = plan[name]
        return sample_setting(
            psi, n1, n2, shots_per_setting, seed, setting_id=name, epsilon=epsilon
        )

    logs = ordered_map(run, GAMMA_SETTINGS, workers)
    freqs = {
        name: float(log.frequencies()[list(plan[name][2])].sum())
        for name, log in zip(GAMMA_SETTINGS, logs)
    }
    p = np.array([freqs[k] for k in GAMMA_SETTINGS])
    gamma = float(np.dot(SIGNS, p))
    se = math.sqrt(sum(binomial_se(x, shots_per_setting) ** 2 for x in p))
    return EstimateWithError(gamma, se, shots_per_setting, freqs, tuple(logs))


CONCURRENCE_SETTINGS = (
    ("zz", ZERO, ZERO),
    ("zx", ZERO, N_B),
    ("zy", ZERO, N_Y),
)


def probabilities_from_counts(zz, zx, zy=None) -> np.ndarray:
    """Protocol probability row(s) from outcome counts of the three settings.

    In the zx run, outcome 01 is qubit 2 found in the state orthogonal to
    |n_b>, which is |n_c> up to phase; so (00, 01, 10, 11) map to
    (P++, P+-, P-+, P--). Accepts stacked count arrays ``(..., 4)``.
    """
    zz, zx = np.asarray(zz, float), np.asarray(zx, float)
    fz = zz / zz.sum(axis=-1, keepdims=True)
    fx = zx / zx.sum(axis=-1, keepdims=True)
    out = np.full(fz.shape[:-1] + (len(PROB_FIELDS),), np.nan)
    out[..., 0:4] = fz
    out[..., 4:8] = fx
    if zy is not None:
        zy = np.asarray(zy, float)
        fy = zy / zy.sum(axis=-1, keepdims=True)
        out[..., 8] = fy[..., 0]
        out[..., 9] = fy[..., 2]
    return out


def estimate_concurrence(
    psi: PureState,
    shots_per_setting: int,
    seed: int,
    branch: str = "resolved",
    *,
    epsilon: float = 0.0,
    resamples: int = DEFAULT_RESAMPLES,
    workers: int | None = 1,
) -> EstimateWithError:
    """C^2 from sampled sz(x)sz, sz(x)sx and sz(x)sy runs with a bootstrap error.

    The point estimate is the unclamped protocol statistic on the observed
    frequencies. Sampling noise can push an implied |cos chi| past 1; such
    rows are projected back rather than rejected, and counted in
    ``components`` (``cos_excursion``, ``bootstrap_excursions``). The error is the standard deviation over ``resamples``
    multinomial resamples of all three count vectors.
    """
    if resamples < 2:
        raise UsageError("need at least two bootstrap resamples")

    def run(item):
        name, n1, n2 = item
        return sample_setting(
            psi, n1, n2, shots_per_setting, seed, setting_id=name, epsilon=epsilon
        )

    logs = ordered_map(run, CONCURRENCE_SETTINGS, workers)
    counts = [log.counts() for log in logs]
    row = probabilities_from_counts(*counts)
    ps = ProbabilitySet.from_array(row)
    est = concurrence_protocol(ps, branch, clamp=False, strict=False).c_squared

    rng = child_generator(seed, "bootstrap", 0)
    boot = [rng.multinomial(shots_per_setting, c / c.sum(), size=resamples) for c in counts]
    c2, _, _, bad = _protocol_parts(probabilities_from_counts(*boot), branch, strict=False)
    se = float(np.std(c2, ddof=1))
    comps = dict(zip(PROB_FIELDS, map(float, row)))
    comps["cos_excursion"] = bool(cos_excursions(row))
    comps["bootstrap_excursions"] = int(bad.sum())
    return EstimateWithError(float(est), se, shots_per_setting, comps, tuple(logs))


def write_trial_log(logs, fh) -> None:
    """CSV with columns trial_index, setting_id, outcome, seed_path."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["trial_index", "setting_id", "outcome", "seed_path"])
    for log in logs:
        prefix = f"{log.seed}/{log.setting_id}/"
        w.writerows(
            (i, log.setting_id, OUTCOMES[c], prefix + str(i // log.block_size))
            for i, c in enumerate(log.outcomes.tolist())
        )


def trial_log_csv(logs) -> str:
    buf = io.StringIO()
    write_trial_log(logs, buf)
    return buf.getvalue()
