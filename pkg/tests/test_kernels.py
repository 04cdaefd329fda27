import numpy as np
import pytest

from jjbell import _backend
from jjbell.evolution import rotation_adjoints

needs_compiled = pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")


def _inputs(rng, m):
    a = rng.normal(size=(m, 4)) + 1j * rng.normal(size=(m, 4))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    u1 = np.ascontiguousarray(rotation_adjoints(rng.uniform(0, 6, m), rng.uniform(-3, 3, m)))
    u2 = np.ascontiguousarray(rotation_adjoints(rng.uniform(0, 6, m), rng.uniform(-3, 3, m)))
    return a, u1, u2


def test_pure_rotation_against_kron(rng):
    a, u1, u2 = _inputs(rng, 5)
    out = _backend.pure.rotate_pairs(a, u1, u2)
    for k in range(5):
        np.testing.assert_allclose(out[k], np.kron(u1[k], u2[k]) @ a[k], atol=1e-15)


@needs_compiled
def test_compiled_matches_pure(rng):
    a, u1, u2 = _inputs(rng, 1000)
    np.testing.assert_allclose(
        _backend.compiled.rotate_pairs(a, u1, u2), _backend.pure.rotate_pairs(a, u1, u2), atol=1e-15
    )
    np.testing.assert_allclose(
        _backend.compiled.rotated_probs(a, u1, u2), _backend.pure.rotated_probs(a, u1, u2), atol=1e-15
    )


@needs_compiled
def test_compiled_draws_match_pure(rng):
    cdf = np.cumsum([0.125, 0.25, 0.25, 0.375])
    u = rng.random(50000)
    u[:4] = [0.0, 0.125, 0.375, 0.625]  # boundaries land in the upper bin
    c = _backend.compiled.draw_outcomes(cdf, u)
    p = _backend.pure.draw_outcomes(cdf, u)
    assert np.array_equal(c, p)
    assert list(p[:4]) == [0, 1, 2, 3]


def test_draw_distribution(backend, rng):
    cdf = np.cumsum([0.1, 0.2, 0.3, 0.4])
    codes = _backend.kernels.draw_outcomes(cdf, rng.random(200000))
    f = np.bincount(codes, minlength=4) / codes.size
    assert np.all(np.abs(f - [0.1, 0.2, 0.3, 0.4]) < 0.01)


def test_backend_name():
    assert _backend.NAME in ("cython", "python")
