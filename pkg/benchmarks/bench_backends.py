"""Time each hot kernel on the compiled and the pure-Python backend.

Example::

    python3 benchmarks/bench_backends.py --n 5000 --d 2 --repeat 3

Prints one row per kernel with the best wall time per backend and the
compiled-over-python speedup. Both backends must agree on every output;
the script exits nonzero if they do not.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from pdpc import _backend
from pdpc.bench import simden_dcut
from pdpc.datagen import GenSpec, generate
from pdpc.fenwick import fenwick_dependent_point
from pdpc.incomplete import incomplete_dependent_point
from pdpc.kdtree import KdTree
from pdpc.pipeline import _bruteforce, compute_densities
from pdpc.priority import priority_dependent_point
from pdpc.unionfind import UnionFind


def kernels(ps, d_cut, rho):
    rng = np.random.default_rng(0)
    a = rng.integers(0, ps.n, ps.n)
    b = rng.integers(0, ps.n, ps.n)

    def union(backend):
        u = UnionFind(ps.n, backend)
        u.union_pairs(a, b)
        return u.roots()

    return {
        "kd build": lambda be: KdTree.build(ps, backend=be).lo,
        "density": lambda be: compute_densities(ps, d_cut, be),
        "priority": lambda be: priority_dependent_point(ps, rho, 2, backend=be),
        "fenwick": lambda be: fenwick_dependent_point(ps, rho, 2, backend=be),
        "incomplete": lambda be: incomplete_dependent_point(ps, rho, 2, backend=be),
        "bruteforce": lambda be: _bruteforce(ps, rho, 2, backend=be),
        "union-find": union,
    }


def timed(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def same(x, y):
    if isinstance(x, tuple):
        return all(np.array_equal(p, q) for p, q in zip(x, y))
    return np.array_equal(x, y)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--kind", default="simden", choices=("uniform", "simden", "varden"))
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if "compiled" not in _backend.available():
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    ps = generate(GenSpec(args.kind, args.n, args.d, args.seed))
    d_cut = simden_dcut(args.d)
    rho = compute_densities(ps, d_cut)

    print(f"{args.kind} n={args.n} d={args.d}, best of {args.repeat}")
    print(f"{'kernel':<12}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    mismatched = []
    for name, fn in kernels(ps, d_cut, rho).items():
        tc, oc = timed(lambda: fn("compiled"), args.repeat)
        tp, op = timed(lambda: fn("python"), args.repeat)
        if not same(oc, op):
            mismatched.append(name)
        print(f"{name:<12}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    if mismatched:
        print(f"outputs differ: {', '.join(mismatched)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
