"""Compare the numba and pure-numpy kernel backends on the hot paths.

    python benchmarks/bench_backends.py [--n 2048] [--repeat 3]

Both backends are run on identical inputs; the script also checks their
outputs agree before reporting timings.
"""
import argparse
import time

import numpy as np

from hyperprop import _accel
from hyperprop.hypergraph import generate
from hyperprop.model import ModelParams
from hyperprop.rng import RngStream


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(n):
    params = ModelParams(n, 0.5, 1.0)
    h = generate(params, RngStream(11))
    csr = h.csr()
    seeds = np.arange(0, n, max(1, n // 32), dtype=np.int32).reshape(-1, 1)
    total3 = n * (n - 1) * (n - 2) // 6
    return {
        "sample_indices": lambda k: k.sample_indices(np.uint64(5), total3, params.p3),
        "closure_sizes": lambda k: k.closure_sizes(n, *csr, seeds, n + 1),
        "explore_sizes": lambda k: k.explore_sizes(n, *csr, seeds, n),
        "connectivity": lambda k: k.connectivity_search(n, *csr[:5], h.edges2, h.edges3)[:2],
        "chain_survival": lambda k: k.chain_survival(
            n, params.p2, params.p3, 1, 8, np.uint64(3), 2000
        ),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    table = cases(args.n)
    # warm the jit cache so compile time stays out of the numbers
    with _accel.using("numba"):
        k = _accel.kernels()
        for fn in table.values():
            fn(k)

    print(f"n={args.n}, best of {args.repeat}")
    print(f"{'kernel':<16}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}  agree")
    for name, fn in table.items():
        with _accel.using("numba"):
            t_nb, out_nb = best_of(lambda: fn(_accel.kernels()), args.repeat)
        with _accel.using("numpy"):
            t_np, out_np = best_of(lambda: fn(_accel.kernels()), 1)
        print(f"{name:<16}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>10.1f}  {same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
