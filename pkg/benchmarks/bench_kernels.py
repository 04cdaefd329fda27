"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--rows 200000] [--draws 2000000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from jjbell import _backend
from jjbell.evolution import rotation_adjoints


def inputs(rows, draws, seed=0):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=(rows, 4)) + 1j * rng.normal(size=(rows, 4))
    amps /= np.linalg.norm(amps, axis=1, keepdims=True)
    u1 = np.ascontiguousarray(rotation_adjoints(rng.uniform(0, 6, rows), rng.uniform(-3, 3, rows)))
    u2 = np.ascontiguousarray(rotation_adjoints(rng.uniform(0, 6, rows), rng.uniform(-3, 3, rows)))
    cdf = np.cumsum([0.1, 0.2, 0.3, 0.4])
    return amps, u1, u2, cdf, rng.random(draws)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=200_000)
    ap.add_argument("--draws", type=int, default=2_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    amps, u1, u2, cdf, uni = inputs(args.rows, args.draws)
    impls = {"python": _backend.pure}
    if _backend.compiled is not None:
        impls["cython"] = _backend.compiled
    else:
        print("compiled kernels unavailable; timing the fallback only")

    cases = {
        "rotated_probs": lambda k: k.rotated_probs(amps, u1, u2),
        "draw_outcomes": lambda k: k.draw_outcomes(cdf, uni),
    }
    print(f"{'kernel':<16}{'backend':<9}{'seconds':>10}{'speedup':>10}")
    for name, case in cases.items():
        base = None
        for label, mod in impls.items():
            t = best(lambda: case(mod), args.repeat)
            base = t if base is None else base
            print(f"{name:<16}{label:<9}{t:>10.4f}{base / t:>9.2f}x")
    if "cython" in impls:
        assert np.allclose(cases["rotated_probs"](impls["cython"]), cases["rotated_probs"](impls["python"]))
        assert np.array_equal(cases["draw_outcomes"](impls["cython"]), cases["draw_outcomes"](impls["python"]))


if __name__ == "__main__":
    main()
