#!/usr/bin/env python3
"""Compare the compiled and pure-Python Gaussian Fock-matrix kernels.

For each cutoff the recurrence is timed on a displaced squeezed thermal
state with both backends, the outputs are checked against each other, and
one CSV row per (backend, cutoff) is written:

    backend,cutoff,median_us,min_us,repeats,max_abs_diff,speedup

``speedup`` is python-time / backend-time. A second section times one full
robustness objective evaluation (Fock matrix plus D_max) per backend.

Usage: python3 benchmarks/bench_kernels.py [--cutoffs 20,40,60,80,120] [--repeats 200] [--out FILE]
"""
import argparse
import csv
import statistics
import sys
import time

import numpy as np

from cvrl import _kernels
from cvrl.fock import fock_state
from cvrl.gaussian import GaussianParams, _bargmann, params_to_moments
from cvrl.optimize import OptimizerConfig
from cvrl.robustness import _gaussian_objective

PARAMS = GaussianParams(nbar=0.7, r=0.3, phi=1.1, alpha=(0.8, -0.4))


def _time(fn, repeats):
    fn()  # warm-up
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples) * 1e6, min(samples) * 1e6


def bench_kernel(cutoffs, repeats):
    m = params_to_moments(PARAMS)
    A, b, scale = _bargmann(m.mu, m.V)
    coeffs = (complex(A[0, 0]), complex(A[0, 1]), complex(A[1, 1]),
              complex(b[0]), complex(b[1]), complex(scale))
    rows = []
    for N in cutoffs:
        ref = _kernels.IMPLEMENTATIONS["python"](*coeffs, N)
        base = None
        for name in sorted(_kernels.IMPLEMENTATIONS, key=lambda k: k != "python"):
            kern = _kernels.IMPLEMENTATIONS[name]
            med, best = _time(lambda: kern(*coeffs, N), repeats)
            if name == "python":
                base = med
            diff = float(np.max(np.abs(kern(*coeffs, N) - ref)))
            rows.append({"backend": name, "cutoff": N, "median_us": round(med, 2),
                         "min_us": round(best, 2), "repeats": repeats,
                         "max_abs_diff": diff, "speedup": round(base / med, 2)})
    return rows


def bench_objective(cutoff, repeats):
    rho = fock_state(2, cutoff).data
    cfg = OptimizerConfig()
    rows = []
    original = _kernels.gaussian_fock_block
    try:
        for name in sorted(_kernels.IMPLEMENTATIONS, key=lambda k: k != "python"):
            _kernels.gaussian_fock_block = _kernels.IMPLEMENTATIONS[name]
            f = _gaussian_objective(rho, cutoff, cfg)
            med, best = _time(lambda: f(PARAMS), repeats)
            rows.append({"backend": name, "cutoff": cutoff, "median_us": round(med, 2),
                         "min_us": round(best, 2), "repeats": repeats})
    finally:
        _kernels.gaussian_fock_block = original
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cutoffs", default="20,40,60,80,120")
    ap.add_argument("--repeats", type=int, default=200)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)
    cutoffs = [int(c) for c in args.cutoffs.split(",")]

    if "cython" not in _kernels.IMPLEMENTATIONS:
        print("compiled kernel not built; only the python backend is timed", file=sys.stderr)

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=["backend", "cutoff", "median_us", "min_us",
                                            "repeats", "max_abs_diff", "speedup"],
                           lineterminator="\n")
        w.writeheader()
        for row in bench_kernel(cutoffs, args.repeats):
            w.writerow(row)
        print(file=out)
        w = csv.DictWriter(out, fieldnames=["backend", "cutoff", "median_us", "min_us", "repeats"],
                           lineterminator="\n")
        print("# full robustness objective (Fock matrix + D_max)", file=out)
        w.writeheader()
        for row in bench_objective(max(cutoffs[-1] // 2, 20), max(args.repeats // 4, 10)):
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    main()
