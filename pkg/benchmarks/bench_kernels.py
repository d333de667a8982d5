"""Compare the compiled and pure-Python kernels on the reference grid.

    python3 benchmarks/bench_kernels.py [--n 4001] [--repeat 5]

Times the Thomas solve, one full profile sweep and the truncated sweep used
by the speed root-find, checks that both backends agree bit-for-bit, and
finally times a complete Fisher-KPP solve with each backend.
"""
import argparse
import time

import numpy as np

from bgpwave import Grid, ModelParams
from bgpwave.kernels import get_backend
from bgpwave.kpp import kpp_initial_profile, relaxed_right_bc, solve_kpp


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4001, help="grid points (odd)")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-solve", action="store_true", help="kernels only")
    args = ap.parse_args()

    a = 40.0
    grid = Grid(a, 2 * a / (args.n - 1))
    params = ModelParams(1.0, 2.0)
    rng = np.random.default_rng(0)
    n = grid.n
    sub = -1.0 + 0.1 * rng.random(n)
    sup = -1.0 + 0.1 * rng.random(n)
    diag = 2.5 + rng.random(n)
    rhs = rng.random(n)
    F = kpp_initial_profile(grid)
    w, S = np.ones(n), np.zeros(n)
    c = 2.8
    fr = relaxed_right_bc(c, grid, params)

    try:
        backends = {"cython": get_backend("cython"), "python": get_backend("python")}
    except ImportError:
        backends = {"python": get_backend("python")}
        print("compiled extension not built; timing the pure-Python kernels only")

    results = {}
    print(f"n = {n}, best of {args.repeat}")
    print(f"{'kernel':<14}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, call in [
        ("thomas", lambda k: k.thomas(sub, diag, sup, rhs)),
        ("f_sweep", lambda k: k.f_sweep(F, w, S, c, 1.0, 2.0, grid.h, 1.0, fr)),
        ("f_sweep_at", lambda k: k.f_sweep_at(F, w, S, c, 1.0, 2.0, grid.h, 1.0, fr, grid.center)),
    ]:
        row = {}
        for b, k in backends.items():
            row[b] = best_of(lambda: call(k), args.repeat)
        results[name] = row
        line = f"{name:<14}" + "".join(f"{row[b][0] * 1e3:>12.3f}ms" for b in backends)
        if len(row) == 2:
            line += f"{row['python'][0] / row['cython'][0]:>9.1f}x"
            same = np.array_equal(np.asarray(row["python"][1]), np.asarray(row["cython"][1]))
            line += "" if same else "  (outputs differ!)"
        print(line)

    if not args.skip_solve:
        print("\nFisher-KPP solve (kappa=1, alpha=2):")
        for b in backends:
            t0 = time.perf_counter()
            wave = solve_kpp(grid, params, backend=b)
            print(f"  {b:<8} c = {wave.c!r}  {wave.iterations} sweeps  {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
