#!/usr/bin/env python3
"""Compare the compiled pixel kernels against the numpy fallback.

Run from the repo root after an editable install:

    python3 benchmarks/bench_kernels.py [--number N]

Both backends are bit-identical (the parity tests assert it); this
script only reports throughput. The "dedup screen" row runs mean_l1 at
the 64x256 crop size the extractor's unchanged-frame screen was sized
for, and converts call rate to frames/s assuming the screen's two
distance calls per frame (reject check plus change check).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from asap_align.kernels import fallback

try:
    from asap_align.kernels import _kern
except ImportError:
    _kern = None


def rate(fn, args, number: int) -> float:
    fn(*args)  # warm-up, also catches mismatched signatures early
    start = time.perf_counter()
    for _ in range(number):
        fn(*args)
    return number / (time.perf_counter() - start)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--number", type=int, default=2000,
                        help="calls per measurement (default 2000)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)

    def raster(h, w):
        return rng.integers(0, 256, size=(h, w)).astype(np.uint8)

    cases = [
        ("mean_l1 15x31 (state crop)", "mean_l1",
         (raster(15, 31), raster(15, 31))),
        ("mean_l1 64x256 (dedup screen)", "mean_l1",
         (raster(64, 256), raster(64, 256))),
        ("mean_l1 120x160 (full frame)", "mean_l1",
         (raster(120, 160), raster(120, 160))),
        ("window_codes 17x88 (panel)", "window_codes",
         ((raster(17, 88) > 127).astype(np.uint8),)),
        ("window_codes 64x256", "window_codes",
         ((raster(64, 256) > 127).astype(np.uint8),)),
        ("area_resize 120x160 -> 128x128", "area_resize",
         (raster(120, 160), 128, 128)),
    ]

    backends = [("numpy", fallback)]
    if _kern is not None:
        backends.append(("cython", _kern))
    else:
        print("compiled backend not built; showing the fallback only\n")

    width = max(len(name) for name, _, _ in cases)
    header = f"{'case':<{width}}  " + "".join(f"{n + ' calls/s':>16}" for n, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, attr, call_args in cases:
        rates = [rate(getattr(mod, attr), call_args, args.number) for _, mod in backends]
        row = f"{name:<{width}}  " + "".join(f"{r:>16,.0f}" for r in rates)
        if len(rates) == 2:
            row += f"{rates[1] / rates[0]:>9.1f}x"
        print(row)

    for backend_name, mod in backends:
        screen = rate(mod.mean_l1, (raster(64, 256), raster(64, 256)), args.number)
        print(f"\ndedup screen via {backend_name}: ~{screen / 2:,.0f} frames/s "
              "(two distance calls per frame)")


if __name__ == "__main__":
    main()
