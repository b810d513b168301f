"""Time the numba and numpy kernel backends on representative workloads.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

import numpy as np

from ringext import _kernels
from ringext.oracle import enumerate_codes, oracle_extension_property
from ringext.rings import build_ring
from ringext.weights import builtin_weight, random_weight


def _best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def workloads():
    gf4 = build_ring("GF(4)")
    add_t, mul_t = gf4.tables()
    rng = np.random.default_rng(0)
    x = rng.integers(0, 4, (4096, 3, 3))
    y = rng.integers(0, 4, (4096, 3, 3))
    yield "table_matmul 4096x(3x3) over GF(4)", lambda: _kernels.table_matmul(x, y, add_t, mul_t)

    n = 200000
    src = rng.integers(0, n, n)
    dst = rng.integers(0, n, n)
    yield "orbit_labels 2e5 nodes", lambda: _kernels.orbit_labels(n, src, dst)

    z12 = build_ring("Z(12)")
    a12, m12 = z12.tables()
    yield "axiom_scan Z(12)", lambda: _kernels.axiom_scan(a12, m12)

    for spec in ("Z(12)", "Z(16)", "Mat(2,GF(2))"):
        ring = build_ring(spec)
        enumerate_codes(ring, 2)
        ham = builtin_weight(ring, "hamming")
        yield f"oracle n<=2 {spec} hamming", lambda r=ring, w=ham: oracle_extension_property(r, w)
        w = random_weight(ring, random.Random(0))
        yield f"oracle n<=2 {spec} random", lambda r=ring, w=w: oracle_extension_property(r, w, stop_at_failure=False)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'workload':<40} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, fn in workloads():
        with _kernels.use_backend("numba"):
            fn()  # compile
            t_nb = _best(fn, args.repeat)
        with _kernels.use_backend("numpy"):
            t_np = _best(fn, args.repeat)
        print(f"{name:<40} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
