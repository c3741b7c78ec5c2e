"""Time the compiled logistic sweep kernel against the numpy fallback.

Runs the same seeded logistic ridge problem through both code paths and
prints per-fit wall time plus the speedup.  The compiled path is skipped
(with a note) when numba is unavailable or disabled via PCRIDGE_NO_NUMBA.
"""

import argparse
import time

import numpy as np

from pcridge._kernels import NUMBA_ENABLED, _clg_numba, _clg_numpy
from pcridge.linalg import standardize


def make_problem(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    beta = np.zeros(p)
    beta[: max(1, p // 100)] = 0.8
    eta = -0.5 + X @ beta
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(np.float64)
    dm = standardize(X)
    return np.ascontiguousarray(dm.values), 2.0 * y - 1.0


def run(kernel, X, yy, k, repeats):
    p = X.shape[1]
    times = []
    sweeps = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        _, _, _, sweeps, _, _ = kernel(
            X, yy, k, 5e-4, 1000, True, np.zeros(p), 0.0
        )
        times.append(time.perf_counter() - t0)
    return min(times), sweeps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--p", type=int, default=2000)
    ap.add_argument("--k", type=float, default=5.0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    X, yy = make_problem(args.n, args.p, args.seed)
    print(f"problem: n={args.n} p={args.p} k={args.k}")

    t_np, sw = run(_clg_numpy, X, yy, args.k, args.repeats)
    print(f"numpy fallback : {t_np * 1e3:9.1f} ms/fit ({sw} sweeps)")

    if not NUMBA_ENABLED or _clg_numba is None:
        print("compiled kernel: unavailable (numba missing or disabled)")
        return

    run(_clg_numba, X, yy, args.k, 1)  # compile outside the timer
    t_nb, sw = run(_clg_numba, X, yy, args.k, args.repeats)
    print(f"compiled kernel: {t_nb * 1e3:9.1f} ms/fit ({sw} sweeps)")
    print(f"speedup        : {t_np / t_nb:9.2f}x")


if __name__ == "__main__":
    main()
