"""Optimization drivers: binary search over exact value grids.

Every objective reduces to feasibility questions "is there a schedule at
least as good as T".  Any optimum is some machine's integer load divided
by that machine's speed, so the search runs per machine type over the
exact grid {k / s_t} and never leaves rational arithmetic.

A feasibility question is answered by: normalize speeds to threshold 1,
compress fast machines into slow ones, then either set up the
configuration model directly (all machines slow) or run the balanced
pipeline: guess the integral data of the rounded fractional schedule on
the fast machines, preassign its floor minus a small margin, and solve
the much smaller residual model.  Either way the answer is certified by
verify_schedule before being returned; a wrong guess can only surface as
a discarded guess, never as a wrong verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .balancing import (
    cmin_to_idle_cmax,
    large_machine_cutoff,
)
from .confilp import LoadWindow, build_model, enumerate_configs, solve_model
from .model import (
    CertificateError,
    FeasibilityQuery,
    GE,
    HMSchedule,
    Instance,
    JOB_EQ,
    JOB_GE,
    JOB_LE,
    LE,
    MalformedInputError,
    aggregate_jobs,
    make_schedule,
    schedule_completions,
    verify_schedule,
)
from .reduction import compress, lift_schedule, normalize


class InfeasibleRestrictionError(RuntimeError):
    """A demanded job type has no machine type that may run it."""


@dataclass(frozen=True)
class SolveResult:
    objective: str
    value: Fraction
    schedule: HMSchedule
    trace: dict


@dataclass(frozen=True)
class CandidateGrid:
    """Description of the exact search set for one objective.

    For cmax/cmin each entry is (type, denominator, max_numerator): the
    values {k / denominator : 0 <= k <= max_numerator}.  For cenvy the
    entries are (type1, type2, denominator, max_numerator) with the
    denominator being the product of the two speeds.
    """

    objective: str
    entries: tuple[tuple[int, ...], ...]


def candidate_values(inst: Instance, objective: str) -> CandidateGrid:
    P = inst.total_load
    if objective in ("cmax", "cmin"):
        entries = tuple((t, inst.s[t], inst.s[t] * P)
                        for t in range(inst.tau) if inst.m[t] > 0)
        return CandidateGrid(objective, entries)
    if objective == "cenvy":
        entries = []
        for t1 in range(inst.tau):
            if inst.m[t1] == 0:
                continue
            for t2 in range(inst.tau):
                if inst.m[t2] == 0:
                    continue
                den = inst.s[t1] * inst.s[t2]
                entries.append((t1, t2, den, inst.pmax * den))
        return CandidateGrid(objective, tuple(entries))
    raise ValueError(f"unknown objective {objective!r}")


def _certify(inst: Instance, sched: HMSchedule, q: FeasibilityQuery) -> None:
    report = verify_schedule(inst, sched, q)
    if not report.ok:
        raise CertificateError("; ".join(report.violations))


def _trim_to_demand(sched: HMSchedule, n: tuple[int, ...],
                    p: tuple[int, ...]) -> HMSchedule:
    """Remove excess jobs until usage equals n (loads only decrease)."""
    usage = aggregate_jobs(sched)
    if any(u < v for u, v in zip(usage, n)):
        raise CertificateError(f"usage {usage} under-covers demand {n}")
    work = [(t, list(cfg.counts), count) for t, cfg, count in sched.entries]
    for j in range(sched.d):
        excess = usage[j] - n[j]
        i = 0
        while excess > 0:
            t, counts, count = work[i]
            if counts[j] == 0:
                i += 1
                continue
            total = min(excess, counts[j] * count)
            full, partial = divmod(total, counts[j])
            work[i] = (t, counts, count - full - (1 if partial else 0))
            if full:
                emptied = list(counts)
                emptied[j] = 0
                work.append((t, emptied, full))
            if partial:
                reduced = list(counts)
                reduced[j] -= partial
                work.append((t, reduced, 1))
            excess -= total
            i += 1
    return make_schedule(sched.d, p, [(t, tuple(c), k) for t, c, k in work])


def _complete_to_demand(sched: HMSchedule, n: tuple[int, ...],
                        p: tuple[int, ...]) -> HMSchedule:
    """Add leftover jobs onto one machine until usage equals n."""
    usage = aggregate_jobs(sched)
    leftover = tuple(v - u for u, v in zip(usage, n))
    if any(x < 0 for x in leftover):
        raise CertificateError(f"usage {usage} exceeds demand {n}")
    if not any(leftover):
        return sched
    if not sched.entries:
        raise CertificateError("no machine to take leftover jobs")
    t, cfg, count = sched.entries[0]
    grown = tuple(c + x for c, x in zip(cfg.counts, leftover))
    raw = [(t, grown, 1), (t, cfg.counts, count - 1)]
    raw += [(tt, cc.counts, kk) for tt, cc, kk in sched.entries[1:]]
    return make_schedule(sched.d, p, raw)


def _remap_types(sched: HMSchedule, mapping: dict[int, int],
                 p: tuple[int, ...]) -> list[tuple[int, tuple[int, ...], int]]:
    return [(mapping[t], cfg.counts, count) for t, cfg, count in sched.entries]


# ---------------------------------------------------------------------------
# Balanced pipeline
# ---------------------------------------------------------------------------

def _direct_windows(inst: Instance, rel: str, idle_cap: int | None) -> list[LoadWindow]:
    windows = []
    for s in inst.s:
        if rel == LE:
            lo = max(0, s - idle_cap) if idle_cap is not None else 0
            windows.append(LoadWindow(lo, s))
        else:
            windows.append(LoadWindow(s, None))
    return windows


def balanced_feasibility(inst: Instance, rel: str, idle_cap: int | None = None,
                         state_limit: int | None = None
                         ) -> tuple[HMSchedule | None, dict]:
    """Feasibility at threshold 1 via fractional-schedule guessing.

    ``rel == "<="`` answers: is there a <=1-feasible schedule using
    exactly n?  ``rel == ">="`` expects the instance to be the converted
    form of a minimum-completion question (speeds already raised by
    pmax - 1) and answers: is there a schedule using at most n whose
    idle load is at most ``idle_cap`` on every machine at threshold 1?

    Machines faster than the large-machine cutoff are handled by
    enumerating the three integral vectors that determine the rounded
    fractional schedule for the (unknown) jobs of the fast machines:
    the common floor phase (entries in [0, pmax]), the spread phase
    floor, and the floored proportional phase of the fastest machine.
    Guesses are pruned by the structural bounds the construction
    guarantees; every surviving guess yields either a certified schedule
    or a discarded guess, so enumeration order cannot affect soundness.
    """
    d, p, n, pmax = inst.d, inst.p, inst.n, inst.pmax
    if rel == GE and idle_cap is None:
        idle_cap = pmax - 1
    cutoff = large_machine_cutoff(d, pmax)
    large = [t for t in range(inst.tau) if inst.m[t] > 0 and inst.s[t] > cutoff]
    small = [t for t in range(inst.tau) if inst.m[t] > 0 and t not in large]
    info: dict = {"path": "balanced", "guesses": 0, "case": None}

    # Capacity prechecks; both modes are load-bounded, so infeasible
    # thresholds die here instead of in the guess enumeration.
    total_load = inst.total_load
    if rel == LE and total_load > sum(s * m for s, m in zip(inst.s, inst.m)):
        return None, info
    if rel == GE and sum(m * max(s - idle_cap, 0)
                         for s, m in zip(inst.s, inst.m)) > total_load:
        return None, info

    demand_relation = JOB_EQ if rel == LE else JOB_LE
    # In ">=" mode the instance is already converted, so every window is
    # the idle-capped <=1 form [s - idle_cap, s].
    mode_windows = (lambda sub: _direct_windows(
        sub, LE, idle_cap if rel == GE else None))

    if not large:
        model = build_model(inst, mode_windows(inst),
                            demand=n, demand_relation=demand_relation)
        sched = solve_model(model, state_limit)
        info["path"] = "balanced-direct"
        return sched, info

    mL = sum(inst.m[t] for t in large)
    smax = max(inst.s[t] for t in large)
    ratio = {t: Fraction(inst.s[t] - cutoff, smax - cutoff) for t in large}
    sum_p = sum(p)
    area2_max = smax - cutoff
    # Per-entry guess caps: besides the capacity bound ceil(smax / p_j),
    # no guessed entry can exceed n_j (each is at most the fast machines'
    # per-type job count divided by at least one machine).
    guess_cap = tuple(min(-(-smax // pj), nj) for pj, nj in zip(p, n))
    g1a_cap = tuple(min(pmax, nj) for nj in n)
    # Integer form of sum-over-machines <= n pruning:
    #   mL*(g1a+g1b)[j]*denom + wnum*g2[j] <= n_j*denom
    denom = smax - cutoff
    wnum = sum(inst.m[t] * (inst.s[t] - cutoff) for t in large)

    def sub_instance(types: list[int], speeds: dict[int, int],
                     demand: tuple[int, ...]) -> tuple[Instance, dict[int, int]]:
        inv = {k: t for k, t in enumerate(types)}
        sub = Instance(p, demand, tuple(speeds[t] for t in types),
                       tuple(inst.m[t] for t in types))
        return sub, inv

    def attempt_case1(g1a, g2) -> HMSchedule | None:
        if rel == GE:
            return None
        configs = {}
        for t in large:
            c = tuple(2 + g1a[j] + math.ceil(ratio[t] * g2[j]) for j in range(d))
            if sum(pj * cj for pj, cj in zip(p, c)) > inst.s[t]:
                return None
            configs[t] = c
        used = [0] * d
        for t in large:
            for j in range(d):
                used[j] += inst.m[t] * configs[t][j]
        remainder = tuple(max(v - u, 0) for u, v in zip(used, n))
        raw = [(t, configs[t], inst.m[t]) for t in large]
        if small:
            sub, inv = sub_instance(small, dict(zip(range(inst.tau), inst.s)),
                                    remainder)
            windows = [LoadWindow(0, sub.s[k]) for k in range(sub.tau)]
            model = build_model(sub, windows, demand=remainder,
                                demand_relation=JOB_GE)
            part = solve_model(model, state_limit)
            if part is None:
                return None
            raw += _remap_types(part, inv, p)
        elif any(remainder):
            return None
        sched = _trim_to_demand(make_schedule(d, p, raw), n, p)
        _certify(inst, sched, FeasibilityQuery(LE, Fraction(1)))
        return sched

    def attempt_case2(g1a, g1b, g2) -> HMSchedule | None:
        margin = pmax if rel == LE else 2 * pmax - 1
        pre = {}
        speeds = {}
        for t in large:
            base = tuple(
                max(g1a[j] + g1b[j] + math.floor(ratio[t] * g2[j]) - margin, 0)
                for j in range(d))
            load = sum(pj * cj for pj, cj in zip(p, base))
            if load > inst.s[t]:
                return None
            pre[t] = base
            speeds[t] = inst.s[t] - load
        placed = [0] * d
        for t in large:
            for j in range(d):
                placed[j] += inst.m[t] * pre[t][j]
        if rel == GE and any(u > v for u, v in zip(placed, n)):
            return None
        if rel == LE:
            residual = tuple(max(v - u, 0) for u, v in zip(placed, n))
            relation = JOB_GE
        else:
            residual = tuple(v - u for u, v in zip(placed, n))
            relation = JOB_LE
        types = large + small
        for t in small:
            speeds[t] = inst.s[t]
        sub, inv = sub_instance(types, speeds, residual)
        model = build_model(sub, mode_windows(sub), demand=residual,
                            demand_relation=relation)
        part = solve_model(model, state_limit)
        if part is None:
            return None
        # Fold the preassignment back into the residual configurations.
        raw = []
        for tt, cfg, count in part.entries:
            t = inv[tt]
            if t in pre:
                merged = tuple(c + b for c, b in zip(cfg.counts, pre[t]))
                raw.append((t, merged, count))
            else:
                raw.append((t, cfg.counts, count))
        sched = make_schedule(d, p, raw)
        if rel == LE:
            sched = _trim_to_demand(sched, n, p)
            _certify(inst, sched, FeasibilityQuery(LE, Fraction(1)))
        else:
            _certify(inst, sched,
                     FeasibilityQuery(LE, Fraction(1), idle_cap, JOB_LE))
        return sched

    all_true = tuple(True for _ in range(d))
    for g1a in enumerate_configs(p, g1a_cap, (0, cutoff), all_true):
        saturated = tuple(g1a[j] == pmax for j in range(d))
        room = cutoff - sum(pj * cj for pj, cj in zip(p, g1a))
        for g1b in enumerate_configs(p, guess_cap, (0, room), saturated):
            case1 = not any(g1b)
            g2_lo = 0 if case1 else max(0, area2_max - sum_p + 1)
            for g2 in enumerate_configs(p, guess_cap, (g2_lo, area2_max),
                                        saturated):
                ok = True
                for j in range(d):
                    if (mL * (g1a[j] + g1b[j]) * denom + wnum * g2[j]
                            > n[j] * denom):
                        ok = False
                        break
                if not ok:
                    continue
                info["guesses"] += 1
                sched = (attempt_case1(g1a, g2) if case1
                         else attempt_case2(g1a, g1b, g2))
                if sched is not None:
                    info["case"] = 1 if case1 else 2
                    return sched, info
    return None, info


# ---------------------------------------------------------------------------
# Feasibility front door
# ---------------------------------------------------------------------------

def feasibility(inst: Instance, rel: str, threshold: Fraction,
                idle_cap: int | None = None, job_relation: str = JOB_EQ,
                method: str = "auto", state_limit: int | None = None,
                trace: dict | None = None) -> HMSchedule | None:
    """Decide rel-threshold feasibility and return a certified schedule.

    Standard queries (no idle cap, job usage exactly n) run the full
    pipeline: normalize, compress, then the direct configuration model
    or the balanced pipeline depending on whether any compressed machine
    exceeds the large-machine cutoff (``method`` forces the choice).
    Idle-capped queries are only supported at threshold 1 on integer
    speeds, because idle loads do not survive speed rescaling; they are
    answered directly on the given instance.
    """
    threshold = Fraction(threshold)
    if inst.restrict is not None:
        raise MalformedInputError("feasibility expects an unrestricted instance")
    if threshold < 0:
        raise MalformedInputError("threshold must be >= 0")
    if method not in ("auto", "balanced", "confilp"):
        raise ValueError(f"unknown method {method!r}")
    if trace is None:
        trace = {}

    if idle_cap is not None or job_relation != JOB_EQ:
        if threshold != 1:
            raise MalformedInputError(
                "idle caps / custom job relations need threshold 1")
        model = build_model(inst, _direct_windows(inst, rel, idle_cap),
                            demand=inst.n, demand_relation=job_relation)
        sched = solve_model(model, state_limit)
        trace["path"] = "direct-confilp"
        if sched is not None:
            _certify(inst, sched,
                     FeasibilityQuery(rel, threshold, idle_cap, job_relation))
        return sched

    if inst.machine_count == 0:
        if all(x == 0 for x in inst.n):
            trace["path"] = "empty"
            return HMSchedule(inst.d, ())
        return None

    norm = normalize(inst, rel, threshold)
    comp, cmap = compress(norm)
    cutoff = large_machine_cutoff(inst.d, inst.pmax)
    has_large = any(s > cutoff and m > 0 for s, m in zip(comp.s, comp.m))
    use_balanced = method == "balanced" or (method == "auto" and has_large)

    if use_balanced:
        if rel == LE:
            sched_c, info = balanced_feasibility(comp, LE,
                                                 state_limit=state_limit)
        else:
            conv, cap = cmin_to_idle_cmax(comp)
            sched_conv, info = balanced_feasibility(conv, GE, idle_cap=cap,
                                                    state_limit=state_limit)
            sched_c = None
            if sched_conv is not None:
                sched_c = _complete_to_demand(sched_conv, comp.n, comp.p)
        trace.update(info)
    else:
        model = build_model(comp, _direct_windows(comp, rel, None),
                            demand=comp.n, demand_relation=JOB_EQ)
        sched_c = solve_model(model, state_limit)
        trace["path"] = "direct-confilp"

    if sched_c is None:
        return None
    lifted = lift_schedule(sched_c, cmap)
    _certify(norm, lifted, FeasibilityQuery(rel, Fraction(1)))
    _certify(inst, lifted, FeasibilityQuery(rel, threshold))
    return lifted


# ---------------------------------------------------------------------------
# Objective drivers
# ---------------------------------------------------------------------------

def _probe_counter(trace: dict) -> None:
    trace["probes"] = trace.get("probes", 0) + 1


def minimize_makespan(inst: Instance, method: str = "auto",
                      state_limit: int | None = None) -> SolveResult:
    """Smallest T with a <=T-feasible schedule using exactly n."""
    if inst.machine_count < 1:
        raise MalformedInputError("need at least one machine")
    if inst.restrict is not None:
        raise MalformedInputError("use solve_restricted for restricted instances")
    P = inst.total_load
    trace: dict = {"probes": 0}
    best: tuple[Fraction, HMSchedule] | None = None
    for t in range(inst.tau):
        if inst.m[t] == 0:
            continue
        s = inst.s[t]
        hi = s * P
        if best is not None:
            hi = min(hi, math.ceil(best[0] * s) - 1)
        lo, found = 0, None
        while lo <= hi:
            mid = (lo + hi) // 2
            _probe_counter(trace)
            sched = feasibility(inst, LE, Fraction(mid, s), method=method,
                                state_limit=state_limit, trace=trace)
            if sched is not None:
                found = (Fraction(mid, s), sched)
                hi = mid - 1
            else:
                lo = mid + 1
        if found is not None and (best is None or found[0] < best[0]):
            best = found
    assert best is not None, "threshold total_load is always feasible"
    _certify(inst, best[1], FeasibilityQuery(LE, best[0]))
    return SolveResult("cmax", best[0], best[1], trace)


def maximize_min_completion(inst: Instance, method: str = "auto",
                            state_limit: int | None = None) -> SolveResult:
    """Largest T with a >=T-feasible schedule using exactly n."""
    if inst.machine_count < 1:
        raise MalformedInputError("need at least one machine")
    if inst.restrict is not None:
        raise MalformedInputError("use solve_restricted for restricted instances")
    P = inst.total_load
    trace: dict = {"probes": 0}
    best: tuple[Fraction, HMSchedule] | None = None
    for t in range(inst.tau):
        if inst.m[t] == 0:
            continue
        s = inst.s[t]
        hi = s * P
        lo = 0
        if best is not None:
            lo = math.floor(best[0] * s) + 1
        found = None
        while lo <= hi:
            mid = (lo + hi) // 2
            _probe_counter(trace)
            sched = feasibility(inst, GE, Fraction(mid, s), method=method,
                                state_limit=state_limit, trace=trace)
            if sched is not None:
                found = (Fraction(mid, s), sched)
                lo = mid + 1
            else:
                hi = mid - 1
        if found is not None and (best is None or found[0] > best[0]):
            best = found
    if best is None:
        # No type beat threshold 0; 0 itself is always feasible.
        _probe_counter(trace)
        sched = feasibility(inst, GE, Fraction(0), method=method,
                            state_limit=state_limit, trace=trace)
        assert sched is not None
        best = (Fraction(0), sched)
    _certify(inst, best[1], FeasibilityQuery(GE, best[0]))
    return SolveResult("cmin", best[0], best[1], trace)


def minimize_envy(inst: Instance, state_limit: int | None = None) -> SolveResult:
    """Smallest achievable gap between the largest and smallest completion.

    The optimum is C1 - C2 for the completions of some two machines, so
    it lies on the grid {k / (s_t1 * s_t2)} for some ordered type pair.
    Per pair, binary search the smallest E such that for some candidate
    top completion C1 on the t1 grid the load windows
    [ceil((C1 - E) * s_t), floor(C1 * s_t)] admit a schedule; such a
    schedule has envy at most E, and at the true pair E = OPT is
    witnessed by the optimal schedule itself, so the minimum over pairs
    is exact.  Candidate C1 values stay within average-completion +-
    pmax; cheap capacity checks discard almost all of them.
    """
    if inst.machine_count < 1:
        raise MalformedInputError("need at least one machine")
    if inst.restrict is not None:
        raise MalformedInputError("envy driver expects an unrestricted instance")
    d, p, n = inst.d, inst.p, inst.n
    P = inst.total_load
    trace: dict = {"pairs": 0, "probes": 0, "solves": 0}
    if P == 0:
        sched = make_schedule(d, p, [(t, (0,) * d, m) for t, m in enumerate(inst.m)])
        _certify(inst, sched, FeasibilityQuery(LE, Fraction(0)))
        return SolveResult("cenvy", Fraction(0), sched, trace)

    pmax = inst.pmax
    total_cap = sum(s * m for s, m in zip(inst.s, inst.m))
    avg = Fraction(P, total_cap)
    active = [t for t in range(inst.tau) if inst.m[t] > 0]

    def windows_for(C1: Fraction, C2: Fraction) -> list[LoadWindow] | None:
        windows = []
        need, room = 0, 0
        for t in range(inst.tau):
            if inst.m[t] == 0:
                # no machine of this type exists, so nothing to bound
                windows.append(LoadWindow(0, None))
                continue
            hi = math.floor(C1 * inst.s[t])
            lo = max(0, math.ceil(C2 * inst.s[t]))
            if lo > hi:
                return None
            windows.append(LoadWindow(lo, hi))
            need += inst.m[t] * lo
            room += inst.m[t] * hi
        if need > P or room < P:
            return None
        return windows

    def check(t1: int, E: Fraction) -> HMSchedule | None:
        s1 = inst.s[t1]
        a_hi = math.floor((avg + pmax) * s1)
        # Smallest a whose upper windows leave room for all jobs.
        lo_a, hi_a = 0, a_hi
        while lo_a < hi_a:
            mid = (lo_a + hi_a) // 2
            room = sum(m * math.floor(Fraction(mid, s1) * s)
                       for s, m in zip(inst.s, inst.m))
            if room >= P:
                hi_a = mid
            else:
                lo_a = mid + 1
        for a in range(lo_a, a_hi + 1):
            C1 = Fraction(a, s1)
            windows = windows_for(C1, C1 - E)
            if windows is None:
                continue
            trace["solves"] += 1
            model = build_model(inst, windows, demand=n, demand_relation=JOB_EQ)
            sched = solve_model(model, state_limit)
            if sched is not None:
                return sched
        return None

    best: tuple[Fraction, HMSchedule] | None = None
    for t1 in active:
        for t2 in active:
            trace["pairs"] += 1
            den = inst.s[t1] * inst.s[t2]
            hi = pmax * den
            if best is not None:
                hi = min(hi, math.ceil(best[0] * den) - 1)
            lo, found = 0, None
            while lo <= hi:
                mid = (lo + hi) // 2
                trace["probes"] += 1
                sched = check(t1, Fraction(mid, den))
                if sched is not None:
                    found = (Fraction(mid, den), sched)
                    hi = mid - 1
                else:
                    lo = mid + 1
            if found is not None and (best is None or found[0] < best[0]):
                best = found
    assert best is not None, "envy pmax is always achievable"
    completions = schedule_completions(inst, best[1])
    achieved = max(completions) - min(completions)
    if achieved != best[0]:
        raise CertificateError(
            f"schedule envy {achieved} != claimed {best[0]}")
    _certify(inst, best[1], FeasibilityQuery(LE, max(completions)))
    return SolveResult("cenvy", best[0], best[1], trace)


def solve_restricted(inst: Instance, objective: str,
                     state_limit: int | None = None) -> SolveResult:
    """Makespan / minimum-completion optimization under restricted assignment.

    No normalization or compression: per guess T the per-type load
    windows [0, floor(T*s_t)] (cmax) or [ceil(T*s_t), unbounded] (cmin)
    are reduced group-wise over each type's allowed job sizes and the
    restricted configuration model is solved directly.
    """
    if objective not in ("cmax", "cmin"):
        raise ValueError(f"restricted solver handles cmax/cmin, not {objective!r}")
    if inst.machine_count < 1:
        raise MalformedInputError("need at least one machine")
    for j in range(inst.d):
        if inst.n[j] > 0 and not any(
                inst.m[t] > 0 and inst.allowed(j, t) for t in range(inst.tau)):
            raise InfeasibleRestrictionError(
                f"job type {j} has {inst.n[j]} jobs but no machine may run it")
    P = inst.total_load
    rel = LE if objective == "cmax" else GE
    trace: dict = {"probes": 0}

    def probe(T: Fraction) -> HMSchedule | None:
        if rel == LE:
            windows = [LoadWindow(0, math.floor(T * s)) for s in inst.s]
        else:
            windows = [LoadWindow(math.ceil(T * s), None) for s in inst.s]
        model = build_model(inst, windows, demand=inst.n, demand_relation=JOB_EQ)
        sched = solve_model(model, state_limit)
        if sched is not None:
            _certify(inst, sched, FeasibilityQuery(rel, T))
        return sched

    best: tuple[Fraction, HMSchedule] | None = None
    for t in range(inst.tau):
        if inst.m[t] == 0:
            continue
        s = inst.s[t]
        if rel == LE:
            lo, hi = 0, s * P
            if best is not None:
                hi = min(hi, math.ceil(best[0] * s) - 1)
            found = None
            while lo <= hi:
                mid = (lo + hi) // 2
                trace["probes"] += 1
                sched = probe(Fraction(mid, s))
                if sched is not None:
                    found = (Fraction(mid, s), sched)
                    hi = mid - 1
                else:
                    lo = mid + 1
            if found is not None and (best is None or found[0] < best[0]):
                best = found
        else:
            lo, hi = 0, s * P
            if best is not None:
                lo = math.floor(best[0] * s) + 1
            found = None
            while lo <= hi:
                mid = (lo + hi) // 2
                trace["probes"] += 1
                sched = probe(Fraction(mid, s))
                if sched is not None:
                    found = (Fraction(mid, s), sched)
                    lo = mid + 1
                else:
                    hi = mid - 1
            if found is not None and (best is None or found[0] > best[0]):
                best = found
    if best is None:
        assert rel == GE, "cmax at threshold total_load is always feasible"
        trace["probes"] += 1
        sched = probe(Fraction(0))
        assert sched is not None
        best = (Fraction(0), sched)
    _certify(inst, best[1], FeasibilityQuery(rel, best[0]))
    return SolveResult(objective, best[0], best[1], trace)
