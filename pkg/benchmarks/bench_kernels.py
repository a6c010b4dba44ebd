"""Time the compiled tensor kernel against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--points 200000] [--repeat 5]

Both backends evaluate the same spline at the same random points; the
script also reports the largest difference between them.
"""

import argparse
import time

import numpy as np

from gradedspline import kernels
from gradedspline.cheb import barycentric_weights, reference_nodes
from gradedspline.classes import ClassKind, FunctionClassSpec, derive_params, test_function
from gradedspline.mesh_ld import decompose_domain_aligned, schedule_ld
from gradedspline.spline_ld import build_spline_ld, nodes_per_dim


def _case(N, npts, seed):
    spec = FunctionClassSpec(ClassKind.Q_u, 1, 0.5, 1, 2)
    d = derive_params(spec)
    part = decompose_domain_aligned(N, d.v, 2, schedule_ld(spec, d, N, "thm34"))
    sp = build_spline_ld(test_function(spec), part, nodes_per_dim(spec, d), continuous=True)
    pts = np.random.default_rng(seed).uniform(-1.0, 1.0, (npts, 2))
    return sp, pts, part.locate(pts)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=16)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()

    sp, pts, idx = _case(a.N, a.points, a.seed)
    p = sp.partition
    y = reference_nodes(sp.s)
    w = barycentric_weights(y)
    print(f"cells={p.n_cells} nodes/axis={sp.s} points={a.points} compiled={kernels.BACKEND == 'cython'}")

    results = {}
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    for b in backends:
        t, out = _time(lambda: kernels.eval_tensor(p.lo, p.hi, sp.values, y, w, idx, pts, backend=b),
                       a.repeat)
        results[b] = out
        print(f"{b:>7}: {t * 1e3:9.2f} ms  ({a.points / t / 1e6:.2f} Mpts/s)")
    if len(results) == 2:
        diff = np.max(np.abs(results["python"] - results["cython"]))
        print(f"max |python - cython| = {diff:.3g}")


if __name__ == "__main__":
    main()
