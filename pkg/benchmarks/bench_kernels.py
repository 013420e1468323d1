"""Compare the compiled and pure-Python kernels on the hot paths.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.
"""

import argparse
import timeit

import numpy as np

from qfri import _pykernels

try:
    from qfri import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def make_inputs(n_dists: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_dists):
        k = int(rng.integers(2, 9))
        v = rng.normal(size=k)
        p = rng.dirichlet(np.ones(k))
        x = v - p @ v
        out.append((np.ascontiguousarray(x / np.max(np.abs(x))), np.ascontiguousarray(p)))
    return out


def workloads(mod, inputs):
    t = np.concatenate([-np.logspace(-4, 4, 256), np.logspace(-4, 4, 256)])
    return {
        "cgf_many (512 points)": lambda: [mod.cgf_many(x, p, t) for x, p in inputs],
        "sup_cgf_ratio": lambda: [mod.sup_cgf_ratio(x, p, 1e-4, 1e4, 64, 1e-8) for x, p in inputs],
        "min_qfri_objective": lambda: [mod.min_qfri_objective(x, p, 0.01, 1.0, 1e-6, 1e6, 128, 1e-8) for x, p in inputs],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dists", type=int, default=200)
    args = ap.parse_args()

    inputs = make_inputs(args.dists)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels not built; timing the Python backend only")

    results = {}
    for name, mod in backends.items():
        for label, fn in workloads(mod, inputs).items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results[(label, name)] = best

    print(f"{'workload':<24}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for label in workloads(_pykernels, inputs):
        py = results[(label, "python")] * 1e3
        if "cython" in backends:
            cy = results[(label, "cython")] * 1e3
            print(f"{label:<24}{py:>14.2f}{cy:>14.2f}{py / cy:>9.1f}x")
        else:
            print(f"{label:<24}{py:>14.2f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
