"""Time the compiled and pure-numpy kernel backends on representative sizes.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per (kernel, size) with the best-of-N wall time for each
backend and the speedup.  Both backends get identical inputs.
"""
import argparse
import itertools
import time

import numpy as np

from tnlab.kernels import available_backends


def _cube_vertices(m):
    return np.array(list(itertools.product((-1.0, 1.0), repeat=m)))


def _symmetrize(a):
    perms = list(itertools.permutations(range(a.ndim)))
    return sum(np.transpose(a, p) for p in perms) / len(perms)


def cases(rng):
    out = []
    for m, n in [(4, 3), (8, 3), (16, 3), (6, 4)]:
        b = rng.standard_normal((m,) * n)
        z0 = rng.standard_normal((n, m))
        z0 /= np.abs(z0).max(axis=1, keepdims=True)
        out.append(("contract", f"m={m} n={n}", lambda k, b=b, z=z0: k.contract(b, z)))
        out.append(("alternating_ascent", f"m={m} n={n} r=1",
                    lambda k, b=b, z=z0: k.alternating_ascent(b, z, 1.0, False, 1e-12, 500, 2)))
        out.append(("alternating_ascent", f"m={m} n={n} r=2",
                    lambda k, b=b, z=z0: k.alternating_ascent(b, z, 2.0, False, 1e-12, 500, 2)))
    for m, n in [(4, 3), (8, 3), (5, 4)]:
        b = _symmetrize(rng.standard_normal((m,) * n))
        z0 = rng.standard_normal(m)
        z0 /= np.linalg.norm(z0)
        out.append(("sym_ascent", f"m={m} n={n} r=2",
                    lambda k, b=b, z=z0: k.sym_ascent(b, z, 2.0, False, 1.0, 1e-12, 500, 2)))
        out.append(("sym_ascent", f"m={m} n={n} r=1",
                    lambda k, b=b, z=z0: k.sym_ascent(b, z, 1.0, False, 1.0, 1e-12, 500, 2)))
    for m, n in [(4, 3), (6, 3), (4, 4)]:
        b = rng.standard_normal((m,) * n)
        V = _cube_vertices(m)
        out.append(("enumerate_multilinear", f"m={m} n={n} cube",
                    lambda k, b=b, V=V: k.enumerate_multilinear(b, V, np.inf, False)))
    return out


def best_time(fn, repeat, inner):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--inner", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the python backend")
    names = [n for n in ("cython", "python") if n in backends]
    rng = np.random.default_rng(args.seed)

    head = f"{'kernel':<22} {'case':<18}" + "".join(f"{n + ' [us]':>14}" for n in names)
    if len(names) == 2:
        head += f"{'speedup':>10}"
    print(head)
    print("-" * len(head))
    for kernel, label, fn in cases(rng):
        times = [best_time(lambda: fn(backends[n]), args.repeat, args.inner) for n in names]
        row = f"{kernel:<22} {label:<18}" + "".join(f"{t * 1e6:>14.1f}" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
