#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

    python benchmarks/bench_backends.py [--full]

--full runs the 5-state record machine to its halt (47M transitions) and a
100M-round orchestrated run instead of the quick capped versions.
"""

import argparse
import time

from orchmach import catalog
from orchmach.backend import get_kernel, tm_run
from orchmach.engine import Breed, RandomPolicy, om1_run
from orchmach.machines import RIGHT, TuringMachine


def time_case(label, fn, kernels):
    rows = []
    for name, kernel in kernels:
        t0 = time.perf_counter()
        steps = fn(kernel)
        dt = time.perf_counter() - t0
        rows.append((name, steps, dt))
    base = rows[-1][2]  # pure is listed last
    for name, steps, dt in rows:
        rate = steps / dt / 1e6 if dt else float("inf")
        speedup = base / dt if dt else float("inf")
        print(f"{label:<28} {name:<9} {steps:>12,} steps  {dt:>8.3f}s "
              f"{rate:>9.1f} M/s  {speedup:>6.1f}x")
    print()


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true",
                    help="run the record machine to halt and 1e8 rounds")
    args = ap.parse_args()

    kernels = []
    try:
        kernels.append(("compiled", get_kernel("compiled")))
    except ImportError:
        print("compiled kernel not available; timing pure only\n")
    kernels.append(("pure", get_kernel("pure")))

    tm_cap = 10 ** 8 if args.full else 2 * 10 ** 6
    om_cap = 10 ** 8 if args.full else 2 * 10 ** 6

    champion = catalog.champion_machine()
    time_case(f"single machine (cap {tm_cap:.0e})",
              lambda k: tm_run(champion, tm_cap, kernel=k).steps, kernels)

    shifter = TuringMachine("shifter", {
        (0, 0): (1, 1, RIGHT), (0, 1): (0, 1, RIGHT),
        (1, 0): (1, 1, RIGHT), (1, 1): (2, 1, RIGHT),
        (2, 0): (2, 1, RIGHT), (2, 1): (3, 1, RIGHT),
        (3, 0): (3, 1, RIGHT), (3, 1): (4, 1, RIGHT),
        (4, 0): (4, 1, RIGHT), (4, 1): (0, 0, RIGHT),
    })
    trivial = Breed("fivestate", (shifter,))
    time_case(f"trivial breed (cap {om_cap:.0e})",
              lambda k: om1_run(trivial, RandomPolicy(0), om_cap,
                                record=False, kernel=k).n, kernels)

    ej = catalog.get_breed("ej")
    time_case("two-member flip pair (1e6)",
              lambda k: om1_run(ej, RandomPolicy(0), 10 ** 6,
                                record=False, kernel=k).n, kernels)


if __name__ == "__main__":
    main()
