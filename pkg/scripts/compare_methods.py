#!/usr/bin/env python3
"""Cross-validate solver paths on a seeded batch and report timings.

For every generated instance, solve all three objectives with the
automatic pipeline, the forced balanced pipeline, the forced direct
configuration model, and the brute-force oracle, and compare the exact
optima.  Any disagreement is a bug; the script exits nonzero on one.

Example:
    python scripts/compare_methods.py --count 50 --seed 0 --jobs-max 12
"""

import argparse
import sys
import time
from collections import Counter

from hmsched import drivers, oracle


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs-max", type=int, default=12)
    ap.add_argument("--machines-max", type=int, default=4)
    ap.add_argument("--speed-max", type=int, default=30)
    args = ap.parse_args()

    timings: Counter = Counter()
    mismatches = 0
    solved = 0
    for seed in range(args.seed, args.seed + args.count):
        inst = oracle.generate(oracle.GenParams(
            seed=seed, job_total_range=(0, args.jobs_max),
            machine_count_range=(1, args.machines_max),
            speed_range=(1, args.speed_max)))
        if inst.machine_count == 0:
            continue
        try:
            reference = {obj: oracle.brute_force(inst, obj)[0]
                         for obj in ("cmax", "cmin", "cenvy")}
        except oracle.OracleCapError:
            continue
        runs = [
            ("auto/cmax", lambda: drivers.minimize_makespan(inst).value,
             reference["cmax"]),
            ("balanced/cmax",
             lambda: drivers.minimize_makespan(inst, method="balanced").value,
             reference["cmax"]),
            ("confilp/cmax",
             lambda: drivers.minimize_makespan(inst, method="confilp").value,
             reference["cmax"]),
            ("auto/cmin", lambda: drivers.maximize_min_completion(inst).value,
             reference["cmin"]),
            ("balanced/cmin",
             lambda: drivers.maximize_min_completion(inst, method="balanced").value,
             reference["cmin"]),
            ("auto/cenvy", lambda: drivers.minimize_envy(inst).value,
             reference["cenvy"]),
        ]
        for label, run, want in runs:
            start = time.perf_counter()
            got = run()
            timings[label] += time.perf_counter() - start
            if got != want:
                mismatches += 1
                print(f"MISMATCH seed={seed} {label}: got {got}, oracle {want}")
        solved += 1

    print(f"\n{solved} instances cross-validated, {mismatches} mismatches")
    for label, total in sorted(timings.items()):
        print(f"  {label:16s} {total:7.2f}s total  {total / max(solved, 1) * 1000:7.1f} ms/instance")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
