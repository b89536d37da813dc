"""Compiled vs pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--quick]

Times the WH potential/gradient kernel, a full fiducial search with early
stopping off, and the orthogonal-mate exact cover on order-6 squares.
"""
import argparse
import contextlib
import time

import numpy as np

from qdesign import _purekernels, kernels
from qdesign.geometry import LatinSquare, cyclic_square, search_orthogonal_mate
from qdesign.sic import SearchConfig, search_fiducial

try:
    from qdesign import _kernels
except ImportError:
    _kernels = None


@contextlib.contextmanager
def backend(impl):
    saved = kernels.exact_cover, kernels.wh_potential_grad
    kernels.exact_cover, kernels.wh_potential_grad = impl.exact_cover, impl.wh_potential_grad
    try:
        yield
    finally:
        kernels.exact_cover, kernels.wh_potential_grad = saved


def timed(fn, min_time=0.3):
    n, t0 = 0, time.perf_counter()
    while True:
        fn()
        n += 1
        dt = time.perf_counter() - t0
        if dt >= min_time:
            return dt / n


def isotope(sq, rng):
    a = sq.array()[rng.permutation(sq.order)][:, rng.permutation(sq.order)]
    return LatinSquare.from_array(rng.permutation(sq.order)[a])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    impls = [("python", _purekernels)] + ([("compiled", _kernels)] if _kernels else [])
    dims = (4, 8) if args.quick else (4, 8, 16)
    rng = np.random.default_rng(0)
    squares = [cyclic_square(6)] + [isotope(cyclic_square(6), rng) for _ in range(3)]
    search_cfg = SearchConfig(restarts=2 if args.quick else 4, seed=0, early_stop=False)

    rows = []
    for N in dims:
        f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        f /= np.linalg.norm(f)
        rows.append((f"potential+grad N={N}",
                     [timed(lambda: impl.wh_potential_grad(f)) for _, impl in impls]))
    for N in (3, 5):
        out = []
        for _, impl in impls:
            with backend(impl):
                out.append(timed(lambda: search_fiducial(N, search_cfg), min_time=0.0))
        rows.append((f"search N={N}, {search_cfg.restarts} restarts", out))
    out = []
    for _, impl in impls:
        with backend(impl):
            out.append(timed(lambda: [search_orthogonal_mate(s) for s in squares]))
    rows.append((f"mate search, {len(squares)} order-6 squares", out))

    head = f"{'case':<36}" + "".join(f"{name:>14}" for name, _ in impls)
    print(head + ("      speedup" if len(impls) == 2 else ""))
    for name, ts in rows:
        line = f"{name:<36}" + "".join(f"{t * 1e3:>12.3f}ms" for t in ts)
        if len(ts) == 2:
            line += f"{ts[0] / ts[1]:>12.1f}x"
        print(line)


if __name__ == "__main__":
    main()
