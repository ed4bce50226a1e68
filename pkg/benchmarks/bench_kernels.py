#!/usr/bin/env python
"""Compare the numba and pure-numpy kernels.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 8 32 128 --repeat 20
    python benchmarks/bench_kernels.py --output bench.json
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from secure_regen import _kernels as K
from secure_regen.coset_code import build_nested_mds


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_rank(sizes, p, repeat, rng):
    rows = []
    for n in sizes:
        a = rng.integers(0, p, size=(n, n)).astype(np.int64)
        assert K._rank_mod_nb(a, np.int64(p)) == K._rank_mod_np(a, p)
        rows.append({
            "kernel": "rank_mod", "size": n, "p": p,
            "numba_s": _best(lambda: K._rank_mod_nb(a, np.int64(p)), repeat),
            "numpy_s": _best(lambda: K._rank_mod_np(a, p), repeat),
        })
    return rows


def bench_solve(sizes, p, repeat, rng):
    rows = []
    for n in sizes:
        a = rng.integers(0, p, size=(n, n)).astype(np.int64)
        y = rng.integers(0, p, size=n).astype(np.int64)
        rows.append({
            "kernel": "solve_mod", "size": n, "p": p,
            "numba_s": _best(lambda: K._solve_mod_nb(a, y, np.int64(p)), repeat),
            "numpy_s": _best(lambda: K._solve_mod_np(a, y, p), repeat),
        })
    return rows


def bench_enumerate(instances, repeat):
    rows = []
    for n, k, ell, q in instances:
        code = build_nested_mds(n, k, ell, q)
        g = np.ascontiguousarray(code.G)
        rows.append({
            "kernel": "enumerate_codewords", "size": f"{q}^{code.params.M}", "p": q,
            "numba_s": _best(lambda: K._enumerate_codewords_nb(g, np.int64(q)), repeat),
            "numpy_s": _best(lambda: K._enumerate_codewords_np(g, q), repeat),
        })
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 32, 128, 256])
    parser.add_argument("--p", type=int, default=65521)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--output")
    args = parser.parse_args()

    if not K.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    print("warming up JIT...")
    K.warmup()
    rng = np.random.default_rng(0)
    results = bench_rank(args.sizes, args.p, args.repeat, rng)
    results += bench_solve(args.sizes, args.p, args.repeat, rng)
    results += bench_enumerate([(3, 2, 1, 7), (4, 2, 1, 7), (4, 3, 2, 7), (4, 3, 1, 11)], args.repeat)

    print(f"{'kernel':<22}{'size':>10}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for r in results:
        r["speedup"] = r["numpy_s"] / max(r["numba_s"], 1e-12)
        print(f"{r['kernel']:<22}{str(r['size']):>10}{r['numba_s']:>12.6f}{r['numpy_s']:>12.6f}{r['speedup']:>9.1f}x")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
