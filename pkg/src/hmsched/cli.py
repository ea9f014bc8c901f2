"""Command line interface: solve / check / gen / bench.

Instances and schedules travel as JSON with explicit integer arrays;
rational values are serialized as exact "num/den" strings.  Result
documents are deterministic for a fixed seed and method -- anything
timing-related goes to stderr, never into the document.

Exit codes for ``solve``: 0 success, 1 malformed input, 2 no feasible
schedule exists (a restricted job type with no machine allowed to run
it), 3 resource limit exceeded.  The solver's state budget is read from
the environment variable HMSCHED_STATE_LIMIT (default 2,000,000 states).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import drivers, oracle
from .confilp import ResourceLimitError, STATE_LIMIT_ENV
from .model import (
    Configuration,
    FeasibilityQuery,
    GE,
    HMSchedule,
    Instance,
    LE,
    MalformedInputError,
    format_rational,
    parse_rational,
    schedule_completions,
    verify_schedule,
)

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_NO_SCHEDULE = 2
EXIT_RESOURCE = 3
EXIT_CHECK_FAILED = 4


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def instance_to_doc(inst: Instance) -> dict:
    doc = {
        "d": inst.d,
        "tau": inst.tau,
        "p": list(inst.p),
        "n": list(inst.n),
        "s": list(inst.s),
        "m": list(inst.m),
    }
    if inst.restrict is not None:
        doc["restrict"] = [list(row) for row in inst.restrict]
    if inst.name is not None:
        doc["name"] = inst.name
    return doc


def instance_from_doc(doc: dict) -> Instance:
    try:
        p = tuple(doc["p"])
        n = tuple(doc["n"])
        s = tuple(doc["s"])
        m = tuple(doc["m"])
    except (KeyError, TypeError) as exc:
        raise MalformedInputError(f"missing field: {exc}") from exc
    restrict = doc.get("restrict")
    if restrict is not None:
        restrict = tuple(tuple(bool(v) for v in row) for row in restrict)
    inst = Instance(p, n, s, m, restrict, doc.get("name"))
    if "d" in doc and doc["d"] != inst.d:
        raise MalformedInputError("d does not match len(p)")
    if "tau" in doc and doc["tau"] != inst.tau:
        raise MalformedInputError("tau does not match len(s)")
    if any(x < 1 for x in inst.s):
        raise MalformedInputError("instance files need speeds >= 1")
    return inst


def schedule_to_doc(sched: HMSchedule) -> dict:
    return {
        "d": sched.d,
        "entries": [[t, list(cfg.counts), count]
                    for t, cfg, count in sched.entries],
    }


def schedule_from_doc(doc: dict, p: tuple[int, ...]) -> HMSchedule:
    try:
        entries = tuple(
            (int(t), Configuration.from_counts(tuple(counts), p), int(count))
            for t, counts, count in doc["entries"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad schedule document: {exc}") from exc
    return HMSchedule(int(doc.get("d", len(p))), entries)


def dump_doc(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _solve_with_oracle(inst: Instance, objective: str):
    value, sched = oracle.brute_force(inst, objective)
    return drivers.SolveResult(objective, value, sched, {"path": "oracle"})


def cmd_solve(args: argparse.Namespace) -> int:
    inst = instance_from_doc(load_json(args.input))
    objective = args.objective
    method = args.method
    restricted = inst.restrict is not None
    start = time.monotonic()
    try:
        if method == "oracle":
            result = _solve_with_oracle(inst, objective)
        elif restricted:
            if objective == "cenvy":
                raise MalformedInputError(
                    "cenvy does not support restricted instances")
            if method == "balanced":
                raise MalformedInputError(
                    "restricted instances solve via confilp or oracle")
            result = drivers.solve_restricted(inst, objective)
        elif objective == "cmax":
            result = drivers.minimize_makespan(inst, method=method)
        elif objective == "cmin":
            result = drivers.maximize_min_completion(inst, method=method)
        else:
            if method == "balanced":
                raise MalformedInputError("cenvy has no balanced pipeline")
            result = drivers.minimize_envy(inst)
    except drivers.InfeasibleRestrictionError as exc:
        print(f"no feasible schedule: {exc}", file=sys.stderr)
        return EXIT_NO_SCHEDULE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    elapsed = time.monotonic() - start

    doc = {
        "objective": result.objective,
        "value": format_rational(result.value),
        "schedule": schedule_to_doc(result.schedule),
        "method": {"requested": method, **result.trace},
    }
    if inst.name:
        doc["instance"] = inst.name
    dump_doc(doc, args.output)
    print(f"solved {objective} in {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def cmd_check(args: argparse.Namespace) -> int:
    inst = instance_from_doc(load_json(args.instance))
    sched = schedule_from_doc(load_json(args.schedule), inst.p)
    value = parse_rational(args.value)
    objective = args.objective
    if objective == "cmax":
        report = verify_schedule(inst, sched, FeasibilityQuery(LE, value))
        ok, violations = report.ok, list(report.violations)
    elif objective == "cmin":
        report = verify_schedule(inst, sched, FeasibilityQuery(GE, value))
        ok, violations = report.ok, list(report.violations)
    else:
        report = verify_schedule(
            inst, sched, FeasibilityQuery(LE, Fraction(inst.total_load + 1)))
        violations = [v for v in report.violations]
        completions = schedule_completions(inst, sched)
        envy = (max(completions) - min(completions)) if completions else Fraction(0)
        if envy > value:
            violations.append(
                f"envy {format_rational(envy)} exceeds {format_rational(value)}")
        ok = not violations
    for v in violations:
        print(v, file=sys.stderr)
    print("ok" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# gen / bench
# ---------------------------------------------------------------------------

def _params_from_args(args: argparse.Namespace, seed: int) -> oracle.GenParams:
    return oracle.GenParams(
        d_range=(args.d_min, args.d_max),
        pmax_range=(args.pmax_min, args.pmax_max),
        machine_count_range=(args.machines_min, args.machines_max),
        speed_range=(args.speed_min, args.speed_max),
        job_total_range=(args.jobs_min, args.jobs_max),
        restricted=args.restricted,
        large_machines=args.large,
        seed=seed,
    )


def _add_gen_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--d-min", type=int, default=1)
    sub.add_argument("--d-max", type=int, default=3)
    sub.add_argument("--pmax-min", type=int, default=1)
    sub.add_argument("--pmax-max", type=int, default=6)
    sub.add_argument("--machines-min", type=int, default=1)
    sub.add_argument("--machines-max", type=int, default=5)
    sub.add_argument("--speed-min", type=int, default=1)
    sub.add_argument("--speed-max", type=int, default=12)
    sub.add_argument("--jobs-min", type=int, default=0)
    sub.add_argument("--jobs-max", type=int, default=14)
    sub.add_argument("--restricted", action="store_true",
                     help="emit a restriction matrix")
    sub.add_argument("--large", action="store_true",
                     help="offset speeds by the large-machine cutoff")


def cmd_gen(args: argparse.Namespace) -> int:
    inst = oracle.generate(_params_from_args(args, args.seed))
    dump_doc(instance_to_doc(inst), args.output)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Solve a batch of generated instances; values on stdout, times on stderr."""
    rows = []
    total = 0.0
    for seed in range(args.seed, args.seed + args.count):
        inst = oracle.generate(_params_from_args(args, seed))
        if inst.machine_count == 0 or not oracle.assignable(inst):
            rows.append((seed, "skipped"))
            continue
        start = time.monotonic()
        try:
            if inst.restrict is not None:
                if args.objective == "cenvy":
                    rows.append((seed, "skipped"))
                    continue
                result = drivers.solve_restricted(inst, args.objective)
            elif args.objective == "cmax":
                result = drivers.minimize_makespan(inst, method=args.method)
            elif args.objective == "cmin":
                result = drivers.maximize_min_completion(inst, method=args.method)
            else:
                result = drivers.minimize_envy(inst)
        except ResourceLimitError:
            print(f"seed {seed}: resource limit", file=sys.stderr)
            return EXIT_RESOURCE
        elapsed = time.monotonic() - start
        total += elapsed
        print(f"seed {seed}: {elapsed:.3f}s", file=sys.stderr)
        rows.append((seed, format_rational(result.value)))
    for seed, value in rows:
        print(f"{seed}\t{value}")
    print(f"total {total:.3f}s over {args.count} seeds", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hmsched",
        description="Exact solver for high-multiplicity scheduling "
                    "on uniform machines",
        epilog=f"State budget: set {STATE_LIMIT_ENV} (states, default 2000000).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="optimize an objective exactly")
    p_solve.add_argument("input", help="instance JSON file")
    p_solve.add_argument("--objective", required=True,
                         choices=["cmax", "cmin", "cenvy"])
    p_solve.add_argument("--method", default="auto",
                         choices=["auto", "balanced", "confilp", "oracle"])
    p_solve.add_argument("--output", help="write the result document here")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check", help="verify a schedule certificate")
    p_check.add_argument("instance")
    p_check.add_argument("schedule")
    p_check.add_argument("--objective", required=True,
                         choices=["cmax", "cmin", "cenvy"])
    p_check.add_argument("--value", required=True,
                         help='claimed objective value, "num/den"')
    p_check.set_defaults(func=cmd_check)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--output", help="write the instance here")
    _add_gen_flags(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="solve a batch of seeded instances")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--count", type=int, default=10)
    p_bench.add_argument("--objective", default="cmax",
                         choices=["cmax", "cmin", "cenvy"])
    p_bench.add_argument("--method", default="auto",
                         choices=["auto", "balanced", "confilp"])
    _add_gen_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MalformedInputError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
