#!/usr/bin/env python3
"""Throughput comparison of the numba kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

The same kernels are selected at import time by VLCOMP_DISABLE_NUMBA; this
script bypasses the switch and times both implementations directly.
"""

import argparse
import math
import time

import numpy as np

from vlcomp._kernels import numpy_impl
from vlcomp.geometry import RoomConfig
from vlcomp.vlc_channel import discretize_room, element_arrays

try:
    from vlcomp._kernels import numba_impl
except ImportError:  # pragma: no cover
    numba_impl = None


def timeit(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    pos, nrm, area, _ = element_arrays(discretize_room(RoomConfig(), 0.5))
    subdiv = 2.5 * math.sqrt(float(np.max(area)))
    ue_pos = rng.uniform(-3, 3, size=(64, 3))
    ue_nrm = np.tile([0.0, 0.0, 1.0], (64, 1))
    ue_area = np.full(64, 1e-4)

    cases = {
        "los_gain_matrix (64 UEs x 672 elements)":
            lambda impl: impl.los_gain_matrix(ue_pos, ue_nrm, ue_area, pos, nrm,
                                              1.0, 0.0),
        "element_transfer_matrix (672x672)":
            lambda impl: impl.element_transfer_matrix(pos, nrm, area, subdiv),
        "p1_scan (K=1000) x 200 instances":
            lambda impl: [impl.p1_scan(0.4 + 0.001 * i, 0.3, 0.7, 200.0,
                                       0.2, 0.9, 1000, 20e6) for i in range(200)],
        "p3_scan (K=1000) x 200 instances":
            lambda impl: [impl.p3_scan(0.4 + 0.001 * i, 0.3, 200.0,
                                       0.55, 1000, 20e6) for i in range(200)],
    }

    impls = [("numpy", numpy_impl)]
    if numba_impl is not None:
        for fn in cases.values():
            fn(numba_impl)  # compile outside the timed region
        impls.append(("numba", numba_impl))

    width = max(len(name) for name in cases)
    header = f"{'kernel':<{width}}  " + "".join(f"{n:>12}" for n, _ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, fn in cases.items():
        times = [timeit(lambda impl=impl: fn(impl), args.repeats)
                 for _, impl in impls]
        row = f"{name:<{width}}  " + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
