"""Configuration enumeration, window reduction, and exact model solving.

A feasibility question "is there a schedule whose per-machine loads lie
in given per-type windows and whose job usage stands in a given relation
to the demand vector" becomes a configuration ILP: per machine type,
choose a multiset of load-window-respecting configurations, one per
machine, so that demands and machine counts match.

Window reduction rewrites each type's window as a small core window plus
a number of exact / slack blocks (see reduction.reduce_window); the
model then carries one column group per (type, part), which keeps both
the number of columns and the coefficients small.  A solved reduced
model recombines into per-machine configurations of the original model
by giving every machine its core part plus its share of block parts; the
block loads telescope so any deterministic pairing lands inside the raw
window.

The solver is an exact dynamic program over remaining demand vectors.
It is deliberately simple: states are demand tuples, machine types are
processed in order, and column groups whose window admits the empty
configuration are handled with a breadth-first "fewest loaded machines"
search so that large machine multiplicities (common after compression)
cost one sweep instead of one sweep per machine.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

from .model import Configuration, HMSchedule, Instance, MalformedInputError, dot
from .reduction import ReductionConstants, reduce_window

JOB_EQ = "="
JOB_LE = "<="
JOB_GE = ">="

DEFAULT_STATE_LIMIT = 2_000_000
STATE_LIMIT_ENV = "HMSCHED_STATE_LIMIT"


class ResourceLimitError(RuntimeError):
    """The solver's state budget was exhausted (distinct from infeasible)."""


def state_limit_default() -> int:
    raw = os.environ.get(STATE_LIMIT_ENV)
    return int(raw) if raw else DEFAULT_STATE_LIMIT


@dataclass(frozen=True)
class LoadWindow:
    """Per-machine-type load bounds; upper=None means unbounded."""

    lower: int
    upper: int | None

    def __post_init__(self):
        if self.lower < 0 or (self.upper is not None and self.upper < self.lower):
            raise MalformedInputError(f"bad window [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class BlockCounts:
    """Bookkeeping from window reduction for one machine type.

    Every machine of the type owes ``exact`` block sub-configurations
    (load exactly ``lcm_load`` when the raw window is bounded, load >=
    ``lcm_load`` otherwise) and ``slack`` sub-configurations of load <=
    ``lcm_load`` on top of its core configuration.
    """

    exact: int
    slack: int
    lcm_load: int
    unbounded: bool


@dataclass(frozen=True)
class ModelGroup:
    """One column group: ``count`` identical machines sharing a column set."""

    machine_type: int
    role: str  # "core" | "exact" | "slack"
    count: int
    window: LoadWindow
    configs: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ConfILPModel:
    p: tuple[int, ...]
    tau: int
    demand: tuple[int, ...]
    demand_relation: str
    groups: tuple[ModelGroup, ...]
    raw_windows: tuple[LoadWindow, ...]


@lru_cache(maxsize=8192)
def _enumerate(p: tuple[int, ...], cap: tuple[int, ...], lower: int,
               upper: int | None, allowed: tuple[bool, ...]) -> tuple[tuple[int, ...], ...]:
    d = len(p)
    bounds = []
    for j in range(d):
        b = cap[j] if allowed[j] else 0
        if upper is not None:
            b = min(b, upper // p[j])
        bounds.append(b)
    # Max load contributable by types j..d-1, for lower-bound pruning.
    suffix = [0] * (d + 1)
    for j in range(d - 1, -1, -1):
        suffix[j] = suffix[j + 1] + p[j] * bounds[j]
    out: list[tuple[int, ...]] = []
    cur = [0] * d

    def rec(j: int, load: int) -> None:
        if j == d:
            if load >= lower:
                out.append(tuple(cur))
            return
        if load + suffix[j] < lower:
            return
        hi = bounds[j]
        if upper is not None:
            hi = min(hi, (upper - load) // p[j])
        for c in range(hi + 1):
            cur[j] = c
            rec(j + 1, load + c * p[j])
        cur[j] = 0

    rec(0, 0)
    return tuple(out)


def enumerate_configs(p: tuple[int, ...], cap: tuple[int, ...],
                      window: tuple[int, int | None],
                      allowed: tuple[bool, ...] | None = None) -> list[tuple[int, ...]]:
    """All c with 0 <= c <= cap, load within window, zero on disallowed types.

    Output is in ascending lexicographic order (first coordinate most
    significant), which every consumer relies on for determinism.
    """
    if any(x < 0 for x in cap):
        raise MalformedInputError("cap must be >= 0")
    if allowed is None:
        allowed = tuple(True for _ in p)
    lower, upper = window
    return list(_enumerate(tuple(p), tuple(cap), lower, upper, tuple(allowed)))


def _type_constants(p: tuple[int, ...], allowed: tuple[bool, ...]) -> ReductionConstants | None:
    """Reduction constants over the allowed job sizes only (None if none)."""
    sizes = tuple(pj for pj, a in zip(p, allowed) if a)
    if not sizes:
        return None
    lcm_load = math.lcm(*sizes)
    return ReductionConstants(lcm_load, len(sizes) * max(sizes) * lcm_load)


def reduced_windows_for(inst: Instance, windows: list[LoadWindow]
                        ) -> tuple[list[LoadWindow], list[BlockCounts]]:
    """Apply window reduction per machine type.

    Returns the core windows plus per-type block counts.  Types are
    reduced with constants computed over their allowed job sizes, so
    restricted instances reduce soundly group by group.  A solution of
    the core-plus-blocks model expands to a solution of the raw model by
    summing, per machine, the core configuration with its share of exact
    and slack block configurations.
    """
    if len(windows) != inst.tau:
        raise MalformedInputError("one window per machine type required")
    cores: list[LoadWindow] = []
    blocks: list[BlockCounts] = []
    for t, win in enumerate(windows):
        consts = _type_constants(inst.p, inst.allowed_row(t))
        if consts is None:
            cores.append(win)
            blocks.append(BlockCounts(0, 0, 1, win.upper is None))
            continue
        red = reduce_window(win.lower, win.upper, consts)
        cores.append(LoadWindow(red.core_lower, red.core_upper))
        blocks.append(BlockCounts(red.exact_blocks, red.slack_blocks,
                                  consts.lcm_load, win.upper is None))
    return cores, blocks


def build_model(inst: Instance, windows: list[LoadWindow], *,
                demand: tuple[int, ...] | None = None,
                demand_relation: str = JOB_EQ,
                reduce: bool = True) -> ConfILPModel:
    """Assemble the configuration model for the given load windows.

    Columns live within the (possibly reduced) window, restricted to the
    type's allowed job set, and are capped at the demand vector whenever
    that cap is sound: always for usage relations = and <=, and for >=
    only on windows without a lower bound (surplus is then removable).
    On lower-bounded windows with relation >= a machine may legitimately
    over-cover; a minimal solution keeps its load below lower + pmax
    unless its job types are all at tight usage, which keeps even
    unbounded windows finite to enumerate.
    """
    if demand is None:
        demand = inst.n
    if demand_relation not in (JOB_EQ, JOB_LE, JOB_GE):
        raise MalformedInputError(f"bad demand relation {demand_relation!r}")
    if reduce:
        cores, blocks = reduced_windows_for(inst, windows)
    else:
        cores = list(windows)
        blocks = [BlockCounts(0, 0, 1, w.upper is None) for w in windows]

    pmax = max(inst.p)

    def column_cap(win: LoadWindow) -> tuple[int, ...]:
        if demand_relation != JOB_GE or win.lower == 0:
            return demand
        if win.upper is not None:
            return tuple(max(d_j, win.upper // pj)
                         for d_j, pj in zip(demand, inst.p))
        return tuple(max(d_j, (win.lower + pmax - 1) // pj)
                     for d_j, pj in zip(demand, inst.p))

    groups: list[ModelGroup] = []
    for t in range(inst.tau):
        if inst.m[t] == 0:
            continue
        allowed = inst.allowed_row(t)
        core_win = cores[t]
        groups.append(ModelGroup(
            t, "core", inst.m[t], core_win,
            tuple(enumerate_configs(inst.p, column_cap(core_win),
                                    (core_win.lower, core_win.upper), allowed))))
        blk = blocks[t]
        if blk.exact > 0:
            win = (LoadWindow(blk.lcm_load, None) if blk.unbounded
                   else LoadWindow(blk.lcm_load, blk.lcm_load))
            groups.append(ModelGroup(
                t, "exact", inst.m[t] * blk.exact, win,
                tuple(enumerate_configs(inst.p, column_cap(win),
                                        (win.lower, win.upper), allowed))))
        if blk.slack > 0:
            win = LoadWindow(0, blk.lcm_load)
            groups.append(ModelGroup(
                t, "slack", inst.m[t] * blk.slack, win,
                tuple(enumerate_configs(inst.p, column_cap(win),
                                        (win.lower, win.upper), allowed))))
    return ConfILPModel(inst.p, inst.tau, tuple(demand), demand_relation,
                        tuple(groups), tuple(windows))


def _necessarily_infeasible(model: ConfILPModel) -> bool:
    """Cheap necessary-condition checks before running the DP."""
    total_load = dot(model.p, model.demand)
    min_load = 0
    max_load = 0
    unbounded = False
    per_job_max = [0] * len(model.p)
    for g in model.groups:
        if g.count == 0:
            continue
        if not g.configs:
            return True
        min_load += g.count * g.window.lower
        if g.window.upper is None:
            unbounded = True
        else:
            max_load += g.count * g.window.upper
        for j in range(len(model.p)):
            best = max((c[j] for c in g.configs), default=0)
            per_job_max[j] = per_job_max[j] + g.count * best
    rel = model.demand_relation
    if rel in (JOB_EQ, JOB_LE) and min_load > total_load:
        return True
    if rel in (JOB_EQ, JOB_GE):
        if not unbounded and max_load < total_load:
            return True
        if any(have < need for have, need in zip(per_job_max, model.demand)):
            return True
    return False


def solve_model(model: ConfILPModel,
                state_limit: int | None = None) -> HMSchedule | None:
    """Exact solve; returns a verified-shape schedule or None if infeasible.

    Dynamic programming over remaining-demand vectors, one column group
    at a time.  Groups whose window admits the empty configuration are
    searched breadth-first for the fewest loaded machines (identical
    machines make any reachability witness reusable), other groups step
    machine by machine.  Tie-breaking is lexicographic everywhere, so the
    returned schedule is deterministic.  Exceeding ``state_limit``
    created states raises ResourceLimitError -- never reported as
    infeasible.
    """
    if state_limit is None:
        state_limit = state_limit_default()
    if _necessarily_infeasible(model):
        return None

    rel = model.demand_relation
    d = len(model.p)
    zero = tuple(0 for _ in range(d))
    budget = [state_limit]

    def transition(state: tuple[int, ...], cfg: tuple[int, ...]) -> tuple[int, ...] | None:
        if rel == JOB_GE:
            return tuple(s - c if s > c else 0 for s, c in zip(state, cfg))
        for s, c in zip(state, cfg):
            if c > s:
                return None
        return tuple(s - c for s, c in zip(state, cfg))

    states: set[tuple[int, ...]] = {model.demand}
    trail: list[tuple] = []
    for group in model.groups:
        if group.count == 0:
            trail.append(("skip",))
            continue
        configs = group.configs
        optional = configs and configs[0] == zero
        if optional:
            parent: dict[tuple[int, ...], tuple] = {}
            dist = dict.fromkeys(states, 0)
            frontier = sorted(states)
            for depth in range(1, group.count + 1):
                fresh = []
                for st in frontier:
                    for ci in range(1, len(configs)):
                        ns = transition(st, configs[ci])
                        if ns is None or ns in dist:
                            continue
                        dist[ns] = depth
                        parent[ns] = (st, ci)
                        fresh.append(ns)
                        budget[0] -= 1
                        if budget[0] < 0:
                            raise ResourceLimitError("state limit exceeded")
                if not fresh:
                    break
                frontier = sorted(fresh)
            states = set(dist)
            trail.append(("bfs", parent))
        else:
            steps: list[dict] = []
            cur: dict[tuple[int, ...], tuple | None] = dict.fromkeys(states)
            for _ in range(group.count):
                nxt: dict[tuple[int, ...], tuple] = {}
                for st in sorted(cur):
                    for ci, cfg in enumerate(configs):
                        ns = transition(st, cfg)
                        if ns is None or ns in nxt:
                            continue
                        nxt[ns] = (st, ci)
                        budget[0] -= 1
                        if budget[0] < 0:
                            raise ResourceLimitError("state limit exceeded")
                steps.append(nxt)
                cur = nxt
                if not cur:
                    break
            states = set(cur)
            trail.append(("steps", steps))
        if not states:
            return None

    if rel in (JOB_EQ, JOB_GE):
        if zero not in states:
            return None
        final = zero
    else:
        final = min(states)

    # Walk the trail backwards, collecting the configs each group used.
    chosen: list[list[tuple[int, ...]]] = [[] for _ in model.groups]
    state = final
    for gi in range(len(model.groups) - 1, -1, -1):
        kind = trail[gi][0]
        group = model.groups[gi]
        if kind == "skip":
            continue
        configs = group.configs
        if kind == "bfs":
            parent = trail[gi][1]
            picks: list[tuple[int, ...]] = []
            while state in parent:
                prev, ci = parent[state]
                picks.append(configs[ci])
                state = prev
            picks.extend([zero] * (group.count - len(picks)))
            chosen[gi] = picks
        else:
            steps = trail[gi][1]
            picks = []
            for si in range(len(steps) - 1, -1, -1):
                prev, ci = steps[si][state]
                picks.append(configs[ci])
                state = prev
            chosen[gi] = picks

    return _recombine(model, chosen)


def _recombine(model: ConfILPModel,
               chosen: list[list[tuple[int, ...]]]) -> HMSchedule:
    """Merge core/exact/slack picks into one configuration per machine."""
    d = len(model.p)
    per_type: dict[int, dict[str, list[tuple[int, ...]]]] = {}
    for gi, group in enumerate(model.groups):
        per_type.setdefault(group.machine_type, {}).setdefault(
            group.role, []).extend(sorted(chosen[gi]))

    entries: list[tuple[int, tuple[int, ...], int]] = []
    for t, roles in sorted(per_type.items()):
        cores = roles.get("core", [])
        exacts = roles.get("exact", [])
        slacks = roles.get("slack", [])
        m = len(cores)
        epm = len(exacts) // m if m else 0
        spm = len(slacks) // m if m else 0
        for i, core in enumerate(cores):
            merged = list(core)
            for piece in exacts[i * epm:(i + 1) * epm]:
                for j in range(d):
                    merged[j] += piece[j]
            for piece in slacks[i * spm:(i + 1) * spm]:
                for j in range(d):
                    merged[j] += piece[j]
            load = dot(model.p, tuple(merged))
            raw = model.raw_windows[t]
            assert raw.lower <= load and (raw.upper is None or load <= raw.upper), \
                "recombined load escaped its window"
            entries.append((t, tuple(merged), 1))

    merged_entries: dict[tuple[int, tuple[int, ...]], int] = {}
    for t, c, k in entries:
        merged_entries[(t, c)] = merged_entries.get((t, c), 0) + k
    return HMSchedule(d, tuple(
        (t, Configuration.from_counts(c, model.p), k)
        for (t, c), k in sorted(merged_entries.items())))
