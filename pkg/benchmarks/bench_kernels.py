"""Time the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 3]

Each case runs once per backend to warm up (numba compiles on first call),
then ``--repeat`` timed runs; the best time is reported.  Results from both
backends are compared for equality before any timing is printed.
"""

import argparse
import time

import numpy as np

from nilfreiman import kernels
from nilfreiman.cosetmap import coset_map
from nilfreiman.generators import heisenberg_box, unitri_box, word_ball
from nilfreiman.subalg import lie_closure
from nilfreiman.unigroup import NilVec


def cases():
    A = heisenberg_box(3, 3, 12)
    A2 = A.power(2)
    yield "product A*A, heisenberg_box(3,3,12)", lambda: kernels.product_rows(3, A.rows, A.rows)
    yield "product A^2*A, heisenberg_box(3,3,12)", lambda: kernels.product_rows(3, A2.rows, A.rows)
    W = word_ball(3, 4)
    W3 = W.power(3)
    yield "product A^3*A, word_ball(3,4)", lambda: kernels.product_rows(3, W3.rows, W.rows)
    B = unitri_box(4, (1, 1, 1, 0, 0, 1))
    B2 = B.power(2)
    yield "product A^2*A, unitri_box n=4", lambda: kernels.product_rows(4, B2.rows, B.rows)
    h = lie_closure([NilVec.elementary(4, 1, 2) + NilVec.elementary(4, 3, 4), NilVec.elementary(4, 2, 3)], 4)
    cm = coset_map(h)
    yield "coset keys of A^2, unitri_box n=4", lambda: cm.keys(B2.rows)
    yield "coset product keys A^2*A, unitri_box n=4", lambda: cm.product_keys(B2.rows, B.rows)


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    print(f"{'case':45s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    with kernels.limits(workers=args.workers):
        for name, fn in cases():
            res = {}
            for be in ("numba", "numpy"):
                with kernels.backend(be):
                    fn()
                    res[be] = best_of(fn, args.repeat)
            assert same(res["numba"][1], res["numpy"][1]), f"backends disagree on {name}"
            tn, tp = res["numba"][0], res["numpy"][0]
            print(f"{name:45s} {tn:10.4f} {tp:10.4f} {tp / tn:8.1f}x")


if __name__ == "__main__":
    main()
