"""Core domain types and schedule certificate verification.

High-multiplicity scheduling on uniform machines: jobs come as (size,
count) pairs and machines as (speed, count) pairs.  A schedule assigns a
configuration (a per-job-type multiplicity vector) to every machine; we
encode schedules compactly as counts of (machine type, configuration)
pairs.  All thresholds, completion times and objective values are exact
rationals -- nothing in this package ever rounds through floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class MalformedInputError(ValueError):
    """Structurally invalid input (dimension mismatch, bad counts, ...)."""


class CertificateError(AssertionError):
    """A solver produced a schedule that failed its own verification."""


# ---------------------------------------------------------------------------
# Exact rationals
# ---------------------------------------------------------------------------

def format_rational(value: Fraction | int) -> str:
    """Render an exact rational as ``"num/den"`` (always with denominator)."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"`` or a plain integer string into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def dot(p: tuple[int, ...], c: tuple[int, ...]) -> int:
    """Integer dot product of two same-length vectors."""
    if len(p) != len(c):
        raise MalformedInputError(f"vector lengths differ: {len(p)} vs {len(c)}")
    return sum(a * b for a, b in zip(p, c))


def dotminus(a, b):
    """Positive difference max(a - b, 0), exact for ints and Fractions."""
    return a - b if a > b else a - a


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Instance:
    """A high-multiplicity scheduling instance.

    ``p``/``n`` give the job sizes and their multiplicities, ``s``/``m``
    the machine speeds and their multiplicities.  ``restrict`` (optional)
    is a d x tau boolean matrix; ``restrict[j][t]`` is True when job type
    ``j`` may run on machine type ``t``.  Absent restrict means every
    pair is allowed.

    User-facing instances have strictly positive speeds; speed 0 is
    permitted internally because threshold normalization can produce
    machines that only fit empty loads.
    """

    p: tuple[int, ...]
    n: tuple[int, ...]
    s: tuple[int, ...]
    m: tuple[int, ...]
    restrict: tuple[tuple[bool, ...], ...] | None = None
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(int(x) for x in self.p))
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        object.__setattr__(self, "s", tuple(int(x) for x in self.s))
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if len(self.p) != len(self.n):
            raise MalformedInputError("p and n must have the same length")
        if len(self.s) != len(self.m):
            raise MalformedInputError("s and m must have the same length")
        if any(x < 1 for x in self.p):
            raise MalformedInputError("job sizes must be >= 1")
        if any(x < 0 for x in self.n):
            raise MalformedInputError("job multiplicities must be >= 0")
        if any(x < 0 for x in self.s):
            raise MalformedInputError("speeds must be >= 0")
        if any(x < 0 for x in self.m):
            raise MalformedInputError("machine multiplicities must be >= 0")
        if self.restrict is not None:
            rows = tuple(tuple(bool(v) for v in row) for row in self.restrict)
            if len(rows) != self.d or any(len(row) != self.tau for row in rows):
                raise MalformedInputError("restrict must be a d x tau matrix")
            object.__setattr__(self, "restrict", rows)

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def tau(self) -> int:
        return len(self.s)

    @property
    def pmax(self) -> int:
        return max(self.p)

    @property
    def pmin(self) -> int:
        return min(self.p)

    @property
    def total_load(self) -> int:
        """Summed processing time of all jobs, p . n."""
        return dot(self.p, self.n)

    @property
    def machine_count(self) -> int:
        return sum(self.m)

    def allowed(self, j: int, t: int) -> bool:
        return self.restrict is None or self.restrict[j][t]

    def allowed_row(self, t: int) -> tuple[bool, ...]:
        """Per-job-type allow mask for machine type t."""
        if self.restrict is None:
            return tuple(True for _ in range(self.d))
        return tuple(self.restrict[j][t] for j in range(self.d))


# ---------------------------------------------------------------------------
# Configurations and schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    """A job-multiplicity vector for one machine, with its total load."""

    counts: tuple[int, ...]
    load: int

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(x) for x in self.counts))
        if any(x < 0 for x in self.counts):
            raise MalformedInputError("configuration counts must be >= 0")

    @classmethod
    def from_counts(cls, counts: tuple[int, ...], p: tuple[int, ...]) -> "Configuration":
        return cls(tuple(counts), dot(p, tuple(counts)))


@dataclass(frozen=True)
class HMSchedule:
    """High-multiplicity schedule: counts of (machine type, configuration).

    Two machines of the same type with different configurations appear as
    two entries.  ``d`` is carried explicitly so empty schedules still
    know their job dimensionality.
    """

    d: int
    entries: tuple[tuple[int, Configuration, int], ...]

    def __post_init__(self):
        norm = []
        for t, cfg, count in self.entries:
            if len(cfg.counts) != self.d:
                raise MalformedInputError("configuration dimension != d")
            if count < 0:
                raise MalformedInputError("entry count must be >= 0")
            norm.append((int(t), cfg, int(count)))
        object.__setattr__(self, "entries", tuple(norm))

    def machines_of_type(self, t: int) -> int:
        return sum(count for tt, _, count in self.entries if tt == t)


def aggregate_jobs(sched: HMSchedule) -> tuple[int, ...]:
    """Total job usage of a schedule: sum of count * config over entries."""
    usage = [0] * sched.d
    for _, cfg, count in sched.entries:
        for j, c in enumerate(cfg.counts):
            usage[j] += count * c
    return tuple(usage)


def make_schedule(d: int, p: tuple[int, ...],
                  raw: list[tuple[int, tuple[int, ...], int]]) -> HMSchedule:
    """Build an HMSchedule from (type, counts, count) triples.

    Entries with count 0 are dropped; identical (type, counts) pairs are
    merged; output order is (type, counts) ascending, which keeps every
    schedule this package emits deterministic.
    """
    merged: dict[tuple[int, tuple[int, ...]], int] = {}
    for t, counts, count in raw:
        if count == 0:
            continue
        key = (t, tuple(counts))
        merged[key] = merged.get(key, 0) + count
    entries = tuple((t, Configuration.from_counts(counts, p), count)
                    for (t, counts), count in sorted(merged.items()))
    return HMSchedule(d, entries)


# ---------------------------------------------------------------------------
# Feasibility queries and verification
# ---------------------------------------------------------------------------

LE = "<="
GE = ">="
JOB_EQ = "="
JOB_LE = "<="
JOB_GE = ">="


@dataclass(frozen=True)
class FeasibilityQuery:
    """What to check a schedule against.

    ``relation`` bounds every machine's completion time by ``threshold``
    (from above for ``<=``, from below for ``>=``).  ``idle_cap`` limits
    the idle load threshold*speed - load on every machine and is only
    meaningful together with ``<=``.  ``job_relation`` compares the
    schedule's total job usage against the instance's n.
    """

    relation: str
    threshold: Fraction
    idle_cap: int | None = None
    job_relation: str = JOB_EQ

    def __post_init__(self):
        if self.relation not in (LE, GE):
            raise MalformedInputError(f"bad relation {self.relation!r}")
        if self.job_relation not in (JOB_EQ, JOB_LE, JOB_GE):
            raise MalformedInputError(f"bad job relation {self.job_relation!r}")
        if self.idle_cap is not None:
            if self.relation != LE:
                raise MalformedInputError("idle_cap requires relation <=")
            if self.idle_cap < 0:
                raise MalformedInputError("idle_cap must be >= 0")
        object.__setattr__(self, "threshold", Fraction(self.threshold))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of verify_schedule; fields are filled even when ok=False."""

    ok: bool
    max_completion: Fraction
    min_completion: Fraction
    max_idle_load: Fraction
    job_usage: tuple[int, ...]
    violations: tuple[str, ...] = field(default=())


def verify_schedule(inst: Instance, sched: HMSchedule,
                    q: FeasibilityQuery) -> VerificationReport:
    """Check a schedule certificate against an instance and query.

    Pure function.  Checks, per machine type: the completion bound under
    ``q.relation`` (in load form, so zero-speed machines are handled
    exactly), the idle cap when present, machine-count consistency with
    m, restriction compliance, and the job usage relation against n.
    Structural dimension mismatches raise MalformedInputError; semantic
    failures are reported as violations with ok=False.
    """
    if sched.d != inst.d:
        raise MalformedInputError(f"schedule has d={sched.d}, instance d={inst.d}")
    for t, _, _ in sched.entries:
        if not 0 <= t < inst.tau:
            raise MalformedInputError(f"machine type {t} out of range")

    violations: list[str] = []
    T = q.threshold
    completions: list[Fraction] = []
    idles: list[Fraction] = []

    for t in range(inst.tau):
        have = sched.machines_of_type(t)
        if have != inst.m[t]:
            violations.append(
                f"type {t}: schedule covers {have} machines, instance has {inst.m[t]}")

    for t, cfg, count in sched.entries:
        if count == 0:
            continue
        load = dot(inst.p, cfg.counts)
        if load != cfg.load:
            violations.append(f"type {t}: stored load {cfg.load} != p.counts {load}")
        speed = inst.s[t]
        if inst.restrict is not None:
            for j, c in enumerate(cfg.counts):
                if c > 0 and not inst.restrict[j][t]:
                    violations.append(f"type {t}: job type {j} not allowed")
        # Load-form completion bound: exact even for speed-0 machines.
        if q.relation == LE:
            if load > T * speed:
                violations.append(
                    f"type {t}: load {load} exceeds {format_rational(T)} * {speed}")
            idles.append(dotminus(T * speed, Fraction(load)))
        else:
            if load < T * speed:
                violations.append(
                    f"type {t}: load {load} below {format_rational(T)} * {speed}")
        # Zero-speed machines are constrained through the load form above;
        # they have no finite completion time to report.
        if speed > 0:
            completions.append(Fraction(load, speed))

    max_idle = max(idles, default=Fraction(0))
    if q.idle_cap is not None and max_idle > q.idle_cap:
        violations.append(
            f"max idle load {format_rational(max_idle)} exceeds cap {q.idle_cap}")

    usage = aggregate_jobs(sched)
    cmp_ok = {
        JOB_EQ: usage == inst.n,
        JOB_LE: all(u <= v for u, v in zip(usage, inst.n)),
        JOB_GE: all(u >= v for u, v in zip(usage, inst.n)),
    }[q.job_relation]
    if not cmp_ok:
        violations.append(f"job usage {usage} not {q.job_relation} n={inst.n}")

    return VerificationReport(
        ok=not violations,
        max_completion=max(completions, default=Fraction(0)),
        min_completion=min(completions, default=Fraction(0)),
        max_idle_load=max_idle,
        job_usage=usage,
        violations=tuple(violations),
    )


def schedule_completions(inst: Instance, sched: HMSchedule) -> list[Fraction]:
    """Completion time of every individual machine under the schedule."""
    out: list[Fraction] = []
    for t, cfg, count in sched.entries:
        if inst.s[t] == 0:
            if cfg.load > 0:
                raise MalformedInputError("positive load on zero-speed machine")
            c = Fraction(0)
        else:
            c = Fraction(cfg.load, inst.s[t])
        out.extend([c] * count)
    return out
