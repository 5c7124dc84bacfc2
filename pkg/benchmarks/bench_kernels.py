"""Compare the numba and numpy kernels and one full replication.

Run with ``python3 benchmarks/bench_kernels.py``.  Each timing is the best of
several repeats after a warm-up call (the warm-up absorbs numba compilation).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from midas_specd import _kernels


def best_of(fn, repeat=5, number=20):
    fn()
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def kernel_rows():
    rng = np.random.default_rng(0)
    rows = []
    for n in (1_000, 76_800, 731_000):
        eta = rng.standard_normal(n)
        t_np = best_of(lambda: _kernels.ar1_filter_numpy(eta, 0.8))
        t_nb = best_of(lambda: _kernels.ar1_filter_numba(eta, 0.8))
        assert np.allclose(_kernels.ar1_filter_numpy(eta, 0.8), _kernels.ar1_filter_numba(eta, 0.8))
        rows.append((f"ar1 n={n}", t_np, t_nb))
    for T, k, L in ((125, 3, 4), (512, 4, 5), (2000, 3, 7)):
        s = rng.standard_normal((T, k))
        t_np = best_of(lambda: _kernels.bartlett_long_run_numpy(s, L))
        t_nb = best_of(lambda: _kernels.bartlett_long_run_numba(s, L))
        assert np.allclose(_kernels.bartlett_long_run_numpy(s, L),
                           _kernels.bartlett_long_run_numba(s, L))
        rows.append((f"bartlett T={T} k={k} L={L}", t_np, t_nb))
    return rows


_REPLICATION = """
import timeit
from midas_specd.harness import GridConfig, run_grid
cfg = GridConfig(T_values=(512,), m_values=(365,), c_values=(0.8,), k_values=(0.0, 0.5),
                 replications=20, methods=("new", "agk", "miller", "lambda"))
run_grid(cfg)
print(min(timeit.repeat(lambda: run_grid(cfg), repeat=3, number=1)) / 20)
"""


def replication_time(backend):
    env = dict(os.environ, MIDAS_SPECD_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _REPLICATION], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--skip-end-to-end", action="store_true")
    args = parser.parse_args(argv)
    rows = kernel_rows()
    if not args.skip_end_to_end:
        rows.append(("replication T=512 m=365 (per rep)",
                     replication_time("numpy"), replication_time("numba")))
    print(f"{'case':38s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speed-up':>9s}")
    for name, t_np, t_nb in rows:
        print(f"{name:38s} {1e3 * t_np:11.4f} {1e3 * t_nb:11.4f} {t_np / t_nb:9.2f}")


if __name__ == "__main__":
    main()
