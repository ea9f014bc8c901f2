#!/usr/bin/env python3
"""Measure how solve time scales with job multiplicities.

High multiplicity means the encoding stays small while the job counts
grow; this probe doubles the total job count on a fixed shape and prints
the wall time per objective, showing where the demand-vector dynamic
program starts to bite and how much the balanced pipeline saves once
machines clear the fast-machine cutoff.

Example:
    python scripts/scaling_probe.py --doublings 6
"""

import argparse
import time

from hmsched import drivers
from hmsched.model import Instance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--doublings", type=int, default=6)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 5])
    args = ap.parse_args()

    p = tuple(args.sizes)
    base = (3, 2) if len(p) == 2 else tuple(2 for _ in p)
    print(f"sizes {p}; machines: two, speeds scale with the load")
    print(f"{'jobs':>12} {'load':>7} {'cmax':>9} {'cmin':>9} {'cenvy':>9}")
    for k in range(args.doublings):
        n = tuple(b << k for b in base)
        load = sum(a * b for a, b in zip(p, n))
        speeds = (max(load * 2 // 3, 1), max(load // 2, 1))
        inst = Instance(p, n, speeds, (1, 1))
        row = [f"{str(n):>12}", f"{load:7d}"]
        for objective, solver in (("cmax", drivers.minimize_makespan),
                                  ("cmin", drivers.maximize_min_completion),
                                  ("cenvy", drivers.minimize_envy)):
            start = time.perf_counter()
            solver(inst)
            row.append(f"{time.perf_counter() - start:8.2f}s")
        print(" ".join(row))


if __name__ == "__main__":
    main()
