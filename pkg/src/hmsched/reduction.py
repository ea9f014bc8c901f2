"""Instance-level reductions.

Four independent tools that shrink feasibility problems before any ILP is
set up:

* ``cut_block``: from any job vector with load >= cut_threshold, split off
  a sub-vector whose load is exactly the lcm of the job sizes.
* ``reduce_window``: rewrite a load window [l, u] as (exact blocks of lcm
  load) + (slack blocks of load <= lcm) + a small core window.
* ``normalize``: rescale speeds so a rel-T feasibility question becomes a
  rel-1 question with integer speeds bounded by 1 + total load.
* ``compress``: replace each very fast machine by several slow ones plus
  a residual, preserving both <=1- and >=1-feasibility; ``lift_schedule``
  undoes the replacement on certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    Configuration,
    HMSchedule,
    Instance,
    MalformedInputError,
    dot,
)

GE = ">="
LE = "<="


@dataclass(frozen=True)
class ReductionConstants:
    """lcm_load = lcm of all job sizes; cut_threshold = d * pmax * lcm_load."""

    lcm_load: int
    cut_threshold: int


def reduction_constants(p: tuple[int, ...]) -> ReductionConstants:
    """Exact lcm of the sizes and the load threshold of the cutting step."""
    if any(x < 1 for x in p):
        raise MalformedInputError("job sizes must be >= 1")
    lcm_load = math.lcm(*p)
    return ReductionConstants(lcm_load, len(p) * max(p) * lcm_load)


def cut_block(w: tuple[int, ...], p: tuple[int, ...]) -> tuple[int, ...]:
    """Split a sub-vector of load exactly lcm(p) out of w.

    Requires p.w >= d * pmax * lcm(p).  Then some single job type j
    already carries load p_j * w_j >= lcm(p), and since p_j divides
    lcm(p), taking lcm(p)/p_j copies of type j is a valid witness.
    Any witness satisfying 0 <= out <= w and p.out = lcm(p) is acceptable
    downstream; this one is deterministic (largest per-type load wins,
    lowest index breaks ties).
    """
    k = reduction_constants(p)
    load = dot(p, w)
    if load < k.cut_threshold:
        raise ValueError(
            f"cut_block requires load >= {k.cut_threshold}, got {load}")
    j = max(range(len(p)), key=lambda i: (p[i] * w[i], -i))
    need = k.lcm_load // p[j]
    assert w[j] >= need, "pigeonhole guarantee violated"
    out = tuple(need if i == j else 0 for i in range(len(p)))
    assert dot(p, out) == k.lcm_load
    return out


@dataclass(frozen=True)
class ReducedWindow:
    """Decomposition of a load window into blocks plus a small core.

    A load-window constraint [lower, upper] on one machine is equivalent
    to: ``exact_blocks`` sub-configurations of load exactly lcm_load
    (load >= lcm_load each when the window is unbounded above), plus
    ``slack_blocks`` sub-configurations of load <= lcm_load, plus one
    core sub-configuration with load in [core_lower, core_upper].
    """

    exact_blocks: int
    slack_blocks: int
    core_lower: int
    core_upper: int | None  # None = unbounded

    def __post_init__(self):
        if self.core_lower < 0:
            raise MalformedInputError("core_lower must be >= 0")


def reduce_window(lower: int, upper: int | None,
                  k: ReductionConstants) -> ReducedWindow:
    """Shrink a load window until its span is below the cut threshold.

    Applies, in a fixed deterministic order: while lower >= cut_threshold,
    peel an exact block (lower and upper both drop by lcm_load; for
    unbounded windows the peeled block has load >= lcm_load and only the
    lower bound drops); then, for bounded windows, while the span
    upper - lower >= cut_threshold + lcm_load, peel a slack block (upper
    drops by lcm_load).  Termination leaves core_lower < cut_threshold
    and, when bounded, span < cut_threshold + lcm_load.
    """
    if lower < 0 or (upper is not None and upper < lower):
        raise MalformedInputError(f"bad window [{lower}, {upper}]")
    delta, gamma = k.lcm_load, k.cut_threshold
    exact = 0
    slack = 0
    if upper is None:
        while lower >= gamma:
            lower -= delta
            exact += 1
        return ReducedWindow(exact, 0, lower, None)
    while lower >= gamma:
        lower -= delta
        upper -= delta
        exact += 1
    while upper - lower >= gamma + delta:
        upper -= delta
        slack += 1
    return ReducedWindow(exact, slack, lower, upper)


def normalize(inst: Instance, rel: str, threshold: Fraction) -> Instance:
    """Rescale speeds so that rel-threshold feasibility becomes rel-1.

    For ``<=``: a load L fits iff L <= T*s iff L <= floor(T*s), and no
    machine can ever receive more than the total load, so the new speed
    is min(floor(T*s), 1 + p.n).  For ``>=``: L >= T*s iff L >= ceil(T*s),
    and a lower bound above the total load is unsatisfiable no matter its
    exact value, so it is clamped to the equally-unsatisfiable 1 + p.n.
    Either way every new speed is an integer at most 1 + p.n.
    """
    T = Fraction(threshold)
    if T < 0:
        raise MalformedInputError("threshold must be >= 0")
    if rel not in (LE, GE):
        raise MalformedInputError(f"bad relation {rel!r}")
    cap = 1 + inst.total_load
    if rel == LE:
        speeds = tuple(min(math.floor(T * s), cap) for s in inst.s)
    else:
        speeds = tuple(min(math.ceil(T * s), cap) for s in inst.s)
    return Instance(inst.p, inst.n, speeds, inst.m, inst.restrict, inst.name)


@dataclass(frozen=True)
class CompressionMap:
    """How compress() rewrote machine types, enough to lift schedules back.

    Original type t keeps one residual machine of ``residual_speed[t]``
    per original machine, plus ``pieces_per_machine[t]`` machines of
    speed ``lcm_load``.  The compressed instance is keyed by distinct
    speeds (``compressed_speeds``); machines of equal speed are
    interchangeable under threshold-1 load windows, so lifting may
    allocate a speed's configurations to the original types in any fixed
    order.
    """

    original_m: tuple[int, ...]
    residual_speed: tuple[int, ...]
    pieces_per_machine: tuple[int, ...]
    compressed_speeds: tuple[int, ...]
    lcm_load: int

    @property
    def is_identity(self) -> bool:
        return (all(x == 0 for x in self.pieces_per_machine)
                and self.compressed_speeds == self.residual_speed)


def compress(inst: Instance) -> tuple[Instance, CompressionMap]:
    """Replace every machine of speed >= cut_threshold + lcm_load.

    Each such machine becomes ceil((s - (cut_threshold + lcm_load)) /
    lcm_load) machines of speed lcm_load plus one residual machine; both
    <=1- and >=1-feasibility are preserved.  The output instance has one
    type per distinct speed (equal speeds are merged, which is what
    keeps the type count below 1 + cut_threshold + lcm_load even when
    normalization has clamped several types to the same speed).  Expects
    an instance already normalized to threshold 1 (integer speeds);
    restricted instances are rejected because merged types have no sound
    restriction row.
    """
    if inst.restrict is not None:
        raise MalformedInputError("compress does not support restricted instances")
    k = reduction_constants(inst.p)
    delta = k.lcm_load
    limit = k.cut_threshold + delta
    residual_speed: list[int] = []
    pieces: list[int] = []
    by_speed: dict[int, int] = {}  # insertion order = first occurrence
    for s, m in zip(inst.s, inst.m):
        if s >= limit:
            num = -((s - limit) // -delta)  # ceil((s - limit) / delta)
            residual = s - num * delta
        else:
            num = 0
            residual = s
        residual_speed.append(residual)
        pieces.append(num)
        by_speed[residual] = by_speed.get(residual, 0) + m
        if num:
            by_speed[delta] = by_speed.get(delta, 0) + num * m
    speeds = tuple(by_speed)
    counts = tuple(by_speed[s] for s in speeds)
    out = Instance(inst.p, inst.n, speeds, counts, None, inst.name)
    cmap = CompressionMap(inst.m, tuple(residual_speed), tuple(pieces),
                          speeds, delta)
    return out, cmap


def lift_schedule(sched: HMSchedule, cmap: CompressionMap) -> HMSchedule:
    """Merge a compressed-instance schedule back onto the original machines.

    Each original machine absorbs one configuration drawn from its
    residual speed's pool plus pieces_per_machine configurations from
    the lcm_load speed's pool.  Loads add up and equal-speed machines
    share identical load windows, so this fixed deterministic allocation
    (pools sorted, consumed in original-type order) preserves both <=1-
    and >=1-feasibility verdicts.
    """
    pools: dict[int, list[Configuration]] = {}
    for t, cfg, count in sched.entries:
        if not 0 <= t < len(cmap.compressed_speeds):
            raise MalformedInputError(f"schedule type {t} unknown to the map")
        pools.setdefault(cmap.compressed_speeds[t], []).extend([cfg] * count)
    for pool in pools.values():
        pool.sort(key=lambda c: c.counts)
    cursor = {speed: 0 for speed in pools}

    def draw(speed: int, how_many: int) -> list[Configuration]:
        pool = pools.get(speed, [])
        at = cursor.get(speed, 0)
        if at + how_many > len(pool):
            raise MalformedInputError(
                f"schedule provides too few machines of speed {speed}")
        cursor[speed] = at + how_many
        return pool[at:at + how_many]

    d = sched.d
    raw: list[tuple[int, Configuration, int]] = []
    for t, m in enumerate(cmap.original_m):
        residuals = draw(cmap.residual_speed[t], m)
        piece_lists = [draw(cmap.lcm_load, cmap.pieces_per_machine[t])
                       for _ in range(m)]
        for cfg, piece_list in zip(residuals, piece_lists):
            merged = list(cfg.counts)
            load = cfg.load
            for piece in piece_list:
                load += piece.load
                for j in range(d):
                    merged[j] += piece.counts[j]
            raw.append((t, Configuration(tuple(merged), load), 1))
    if any(cursor[speed] != len(pool) for speed, pool in pools.items()):
        raise MalformedInputError("schedule has machines the map cannot place")
    return _merge_entries(d, raw)


def _merge_entries(d: int, raw: list[tuple[int, Configuration, int]]) -> HMSchedule:
    merged: dict[tuple[int, Configuration], int] = {}
    for t, cfg, count in raw:
        if count == 0:
            continue
        merged[(t, cfg)] = merged.get((t, cfg), 0) + count
    entries = tuple((t, cfg, count) for (t, cfg), count in
                    sorted(merged.items(), key=lambda kv: (kv[0][0], kv[0][1].counts)))
    return HMSchedule(d, entries)
