import io
import math

import numpy as np
import pytest

from jjbell.chsh import ChshSetting, chsh_gamma
from jjbell.entanglement import concurrence_direct
from jjbell.errors import UsageError
from jjbell.evolution import BlochDirection, evolve_closed_form
from jjbell.linalg import PureState
from jjbell.measurement import (
    BLOCK_SIZE,
    EstimateWithError,
    binomial_se,
    child_generator,
    estimate_concurrence,
    estimate_gamma,
    probabilities_from_counts,
    sample_setting,
    trial_log_csv,
    write_trial_log,
)
from jjbell.model import TwoQubitParams

S00 = PureState.basis("00")
BELL = PureState.normalized([1, 0, 0, 1])
Z = BlochDirection()
REF_SETTING = ChshSetting(BlochDirection(1.2, 0.4), BlochDirection(1.2, -0.3))


def test_reference_state_always_reads_00(backend):
    log = sample_setting(S00, Z, Z, 5000, seed=1)
    assert len(log) == 5000
    assert np.all(log.outcomes == 0)


def test_bell_z_frequencies(backend):
    log = sample_setting(BELL, Z, Z, 10**6, seed=2)
    f = log.frequencies()
    se = binomial_se(0.5, 10**6)
    assert abs(f[0] - 0.5) <= 5 * se
    assert f[1] == 0 and f[2] == 0


def test_same_seed_same_log(backend):
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    a = sample_setting(psi, Z, Z, 3 * BLOCK_SIZE + 17, seed=9)
    b = sample_setting(psi, Z, Z, 3 * BLOCK_SIZE + 17, seed=9)
    assert trial_log_csv([a]) == trial_log_csv([b])
    c = sample_setting(psi, Z, Z, 3 * BLOCK_SIZE + 17, seed=10)
    assert not np.array_equal(a.outcomes, c.outcomes)


def test_backends_draw_identical_trials():
    from jjbell import _backend

    if _backend.compiled is None:
        pytest.skip("compiled kernels not built")
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    cdf = np.cumsum(np.abs(psi.amps) ** 2)
    u = child_generator(4, "x", 0).random(100000)
    assert np.array_equal(_backend.compiled.draw_outcomes(cdf, u), _backend.pure.draw_outcomes(cdf, u))


def test_blocks_are_independent_streams():
    # the RNG for block k depends only on (seed, setting, k)
    a = child_generator(5, "q00", 1).random(4)
    b = child_generator(5, "q00", 1).random(4)
    c = child_generator(5, "q00", 2).random(4)
    d = child_generator(5, "qn0", 1).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)


def test_log_records_and_seed_paths():
    log = sample_setting(BELL, Z, Z, BLOCK_SIZE + 2, seed=3, setting_id="zz")
    recs = list(log.records())
    assert len(recs) == BLOCK_SIZE + 2
    assert recs[0].seed_path == "3/zz/0" and recs[-1].seed_path == "3/zz/1"
    assert [r.trial_index for r in recs[:3]] == [0, 1, 2]
    assert log.counts().sum() == BLOCK_SIZE + 2


def test_shot_count_validation():
    with pytest.raises(UsageError):
        sample_setting(S00, Z, Z, 0, seed=0)
    with pytest.raises(UsageError):
        sample_setting(S00, Z, Z, 10, seed=0, epsilon=1.5)
    with pytest.raises(UsageError):
        EstimateWithError(0.0, 0.0, 0)


def test_readout_flips():
    log = sample_setting(S00, Z, Z, 10**5, seed=4, epsilon=0.1)
    f = log.frequencies()
    exact = np.array([0.81, 0.09, 0.09, 0.01])
    se = np.sqrt(exact * (1 - exact) / 10**5)
    assert np.all(np.abs(f - exact) <= 5 * se)
    assert np.all(sample_setting(S00, Z, Z, 100, seed=4, epsilon=1.0).outcomes == 3)


def test_gamma_estimate_matches_exact():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    exact = chsh_gamma(psi, REF_SETTING).gamma
    est = estimate_gamma(psi, REF_SETTING, 10**6, seed=12)
    assert abs(est.mean - exact) <= 5 * est.std_error
    assert len(est.logs) == 6 and all(len(log) == 10**6 for log in est.logs)


def test_gamma_single_shot():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    values = set()
    for seed in range(40):
        est = estimate_gamma(psi, REF_SETTING, 1, seed=seed)
        assert est.mean == int(est.mean) and -3 <= est.mean <= 3
        # every single-shot frequency is 0 or 1, so each binomial term vanishes
        assert est.std_error == 0.0
        values.add(est.mean)
    assert len(values) > 1


def test_gamma_error_scaling():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    ratios = [
        estimate_gamma(psi, REF_SETTING, 10**4, seed=s).std_error
        / estimate_gamma(psi, REF_SETTING, 4 * 10**4, seed=s).std_error
        for s in range(20)
    ]
    assert abs(np.mean(ratios) - 2) <= 0.1


def test_gamma_coverage_small_samples():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    exact = chsh_gamma(psi, REF_SETTING).gamma
    hits = sum(
        abs(est.mean - exact) <= 5 * est.std_error
        for est in (estimate_gamma(psi, REF_SETTING, 1000, seed=s) for s in range(100))
    )
    assert hits >= 99


@pytest.mark.slow
def test_gamma_consistency_with_growing_shots():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    exact = chsh_gamma(psi, REF_SETTING).gamma
    mean_err = []
    for shots in (10**3, 10**4, 10**5):
        errs = [abs(estimate_gamma(psi, REF_SETTING, shots, seed=s).mean - exact) for s in range(10)]
        mean_err.append(np.mean(errs))
    assert mean_err[0] > mean_err[1] > mean_err[2]
    final = estimate_gamma(psi, REF_SETTING, 10**6, seed=0)
    assert abs(final.mean - exact) <= 5 * final.std_error


def test_gamma_independent_of_workers():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    a = estimate_gamma(psi, REF_SETTING, 20000, seed=8, workers=1)
    b = estimate_gamma(psi, REF_SETTING, 20000, seed=8, workers=3)
    assert a.mean == b.mean and trial_log_csv(a.logs) == trial_log_csv(b.logs)


def test_concurrence_estimates():
    assert estimate_concurrence(S00, 1000, seed=1).mean == 0.0
    est = estimate_concurrence(BELL, 10**6, seed=1)
    assert abs(est.mean - 1) <= 5 * est.std_error + 1e-12
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    est = estimate_concurrence(psi, 10**6, seed=6)
    assert est.std_error > 0
    assert abs(est.mean - concurrence_direct(psi).c_squared) <= 5 * est.std_error


def test_concurrence_estimate_deterministic():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    a = estimate_concurrence(psi, 5000, seed=3, workers=1)
    b = estimate_concurrence(psi, 5000, seed=3, workers=2)
    assert (a.mean, a.std_error) == (b.mean, b.std_error)
    with pytest.raises(UsageError):
        estimate_concurrence(psi, 5000, seed=3, resamples=1)


def test_probabilities_from_counts_layout():
    row = probabilities_from_counts([5, 0, 0, 5], [1, 1, 1, 1], [2, 0, 0, 2])
    np.testing.assert_allclose(row, [0.5, 0, 0, 0.5, 0.25, 0.25, 0.25, 0.25, 0.5, 0])
    assert np.isnan(probabilities_from_counts([1, 0, 0, 0], [1, 0, 0, 0])[8])


def test_trial_log_csv_shape():
    log = sample_setting(BELL, Z, Z, 4, seed=0, setting_id="zz")
    text = trial_log_csv([log])
    lines = text.splitlines()
    assert lines[0] == "trial_index,setting_id,outcome,seed_path"
    assert len(lines) == 5
    assert all(line.split(",")[2] in ("00", "11") for line in lines[1:])
    buf = io.StringIO()
    write_trial_log([log], buf)
    assert buf.getvalue() == text


def test_binomial_se():
    assert binomial_se(0.5, 100) == pytest.approx(0.05)
    assert binomial_se(0.0, 10) == 0.0
    assert math.isclose(binomial_se(0.2, 400), 0.02)


def test_low_shot_concurrence_projects_noisy_cosines():
    psi = evolve_closed_form(TwoQubitParams(1, 1), 0.9)
    seen = 0
    for seed in range(10):
        est = estimate_concurrence(psi, 200, seed=seed, resamples=50)
        assert math.isfinite(est.mean) and math.isfinite(est.std_error)
        seen += est.components["bootstrap_excursions"]
    assert seen > 0
