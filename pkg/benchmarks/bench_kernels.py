"""Compare the compiled and pure-Python annealing kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Both kernels run the same instances; the script checks their outputs are
bit-identical and prints wall times and the speed-up.
"""

import argparse
import time

import numpy as np

from gaussmem.annealer import anneal_run
from gaussmem.core import AnnealSchedule, EstimatorConfig, build_conditions, build_grid
from gaussmem.experiments.testpdf import sample_test_pdf

CASES = [
    # (n_points, n_conditions, steps_per_temp)
    (50, 11, 500),
    (200, 21, 1000),
    (1000, 101, 1000),
]


def bench(n_points, n_conditions, steps, repeat):
    sel = sample_test_pdf(1000, 0)
    g = build_grid(sel, n_points)
    cs = build_conditions(sel, n_conditions, sel.delta_x / 30)
    cfg = EstimatorConfig(n_points=n_points, n_conditions=n_conditions,
                          sa_params=AnnealSchedule(steps_per_temp=steps, t_min=1e-6))
    out, times = {}, {}
    for backend in ("cython", "python"):
        best = np.inf
        for _ in range(repeat if backend == "cython" else 1):
            t0 = time.perf_counter()
            out[backend] = anneal_run(g, cs, cfg, backend)
            best = min(best, time.perf_counter() - t0)
        times[backend] = best
    same = np.array_equal(out["cython"].weights, out["python"].weights)
    moves = steps * len(out["cython"].cost_trace)
    return times, same, moves


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'N_p':>6} {'N_c':>5} {'moves':>9} {'cython s':>10} {'python s':>10} {'speed-up':>9}  identical")
    for n_points, n_conditions, steps in CASES:
        times, same, moves = bench(n_points, n_conditions, steps, args.repeat)
        print(f"{n_points:>6} {n_conditions:>5} {moves:>9} {times['cython']:>10.4f} "
              f"{times['python']:>10.3f} {times['python'] / times['cython']:>9.1f}  {same}")


if __name__ == "__main__":
    main()
