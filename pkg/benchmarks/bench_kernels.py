"""Time the compiled kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row times one call on a problem sized like the turning-corpus
experiments (168 training rows, 22 features). The compiled column is
skipped when numba is missing or DRIVESTYLE_NUMBA=0.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from drivestyle import _accel
from drivestyle.learners.mlp import _train_loops, _train_numpy, init_params
from drivestyle.learners.svm import _smo_loops, _smo_numpy, kernel_matrix
from drivestyle.selection import LabeledDataset, _objective_grad_loops, _objective_grad_numpy


def problem(n=168, d=22, seed=0):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    x = rng.normal(size=(n, d)) + 0.8 * y[:, None]
    return LabeledDataset.from_raw(x, y)


def cases():
    ds = problem()
    x, y = np.ascontiguousarray(ds.x), ds.y.astype(np.int64)
    w = np.full(ds.d, 1 / np.sqrt(ds.d))
    absdiff = np.abs(x[:, None, :] - x[None, :, :])
    ys = np.where(y == 1, 1.0, -1.0)
    K = kernel_matrix(x, x, "gaussian", 1.0 / ds.d)
    w1, b1, w2, b2 = init_params(ds.d, 6, 0)
    yf = y.astype(np.float64)
    return [
        ("NCA objective+gradient",
         lambda: _objective_grad_loops(x, y, w, 1.0, 1 / ds.n),
         lambda: _objective_grad_numpy(x, y, w, 1.0, 1 / ds.n, absdiff)),
        ("SMO dual solve",
         lambda: _smo_loops(K, ys, 1.0, 1e-3, 100_000),
         lambda: _smo_numpy(K, ys, 1.0, 1e-3, 100_000)),
        ("MLP 2000 epochs, 6 hidden",
         lambda: _train_loops(x, yf, w1, b1, w2, b2, 0.5, 2000),
         lambda: _train_numpy(x, yf, w1, b1, w2, b2, 0.5, 2000)),
    ]


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    compiled = _accel.USE_NUMBA
    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speed-up':>10}")
    for name, fast, slow in cases():
        t_np = best_of(slow, args.repeat) * 1e3
        if compiled:
            fast()  # compile outside the timed region
            t_nb = best_of(fast, args.repeat) * 1e3
            print(f"{name:<28}{t_nb:>12.2f}{t_np:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<28}{'n/a':>12}{t_np:>12.2f}{'':>10}")


if __name__ == "__main__":
    main()
