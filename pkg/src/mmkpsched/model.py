"""Platform, application, job and schedule data model.

Time is in seconds, energy in joules. All comparisons use the absolute
tolerance ``EPS``. Progress is linear: a job with remaining ratio ``rho``
on an operating point needs ``exec_time * rho`` seconds and
``energy * rho`` joules to finish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

EPS = 1e-9


class ModelError(ValueError):
    """Malformed model object (bad invariant, overlapping segments, ...)."""


@dataclass(frozen=True)
class Platform:
    resource_counts: tuple[int, ...]
    type_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "resource_counts", tuple(int(c) for c in self.resource_counts))
        object.__setattr__(self, "type_names", tuple(self.type_names))
        if not self.resource_counts:
            raise ModelError("platform needs at least one resource type")
        if len(self.type_names) != len(self.resource_counts):
            raise ModelError("type_names and resource_counts differ in length")
        if any(c < 0 for c in self.resource_counts) or not any(self.resource_counts):
            raise ModelError(f"invalid resource counts {self.resource_counts}")

    @property
    def m(self) -> int:
        return len(self.resource_counts)

    def config_name(self, resources: Sequence[int]) -> str:
        """Compact label such as ``2L1B`` for a resource vector."""
        return "".join(f"{n}{name}" for n, name in zip(resources, self.type_names) if n)


@dataclass(frozen=True)
class OperatingPoint:
    resources: tuple[int, ...]
    exec_time: float
    energy: float

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(int(r) for r in self.resources))
        if any(r < 0 for r in self.resources) or not any(self.resources):
            raise ModelError(f"operating point needs a nonzero resource vector, got {self.resources}")
        if not self.exec_time > 0 or not self.energy > 0:
            raise ModelError("exec_time and energy must be positive")

    @property
    def power(self) -> float:
        return self.energy / self.exec_time

    def dominates(self, other: OperatingPoint) -> bool:
        mine = (*self.resources, self.exec_time, self.energy)
        theirs = (*other.resources, other.exec_time, other.energy)
        return all(a <= b for a, b in zip(mine, theirs)) and any(a < b for a, b in zip(mine, theirs))


@dataclass(frozen=True)
class ApplicationProfile:
    name: str
    points: tuple[OperatingPoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ModelError(f"application {self.name!r} has no operating points")
        dims = {len(p.resources) for p in self.points}
        if len(dims) != 1:
            raise ModelError(f"application {self.name!r} mixes resource vector lengths")


@dataclass(frozen=True)
class Job:
    id: int
    arrival: float
    deadline: float
    app: ApplicationProfile
    remaining_ratio: float = 1.0

    def __post_init__(self):
        if not self.arrival < self.deadline:
            raise ModelError(f"job {self.id}: arrival {self.arrival} not before deadline {self.deadline}")
        if not 0.0 < self.remaining_ratio <= 1.0:
            raise ModelError(f"job {self.id}: remaining ratio {self.remaining_ratio} outside (0, 1]")

    def with_ratio(self, ratio: float) -> Job:
        return Job(self.id, self.arrival, self.deadline, self.app, ratio)


@dataclass(frozen=True)
class JobMapping:
    job: Job
    point_index: int

    def __post_init__(self):
        if not 0 <= self.point_index < len(self.job.app.points):
            raise ModelError(f"job {self.job.id}: point index {self.point_index} out of range")

    @property
    def point(self) -> OperatingPoint:
        return self.job.app.points[self.point_index]


@dataclass(frozen=True)
class MappingSegment:
    """Half-open interval ``[start, end)`` with constant job assignments."""

    start: float
    end: float
    assignments: tuple[JobMapping, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "assignments", tuple(self.assignments))
        if not self.start < self.end:
            raise ModelError(f"segment [{self.start}, {self.end}) is empty or reversed")

    @property
    def length(self) -> float:
        return self.end - self.start

    def resource_usage(self, m: int) -> tuple[int, ...]:
        used = [0] * m
        for a in self.assignments:
            for k, r in enumerate(a.point.resources):
                used[k] += r
        return tuple(used)

    def energy(self) -> float:
        return sum(a.point.energy * self.length / a.point.exec_time for a in self.assignments)

    def with_assignment(self, mapping: JobMapping) -> MappingSegment:
        return MappingSegment(self.start, self.end, self.assignments + (mapping,))


@dataclass(frozen=True)
class Schedule:
    segments: tuple[MappingSegment, ...]
    platform: Platform

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        check_structure(self.segments)

    @property
    def start(self) -> float | None:
        return self.segments[0].start if self.segments else None

    @property
    def end(self) -> float | None:
        return self.segments[-1].end if self.segments else None

    def job_ids(self) -> set[int]:
        return {a.job.id for s in self.segments for a in s.assignments}

    def finish_time(self, job_id: int) -> float | None:
        ends = [s.end for s in self.segments if any(a.job.id == job_id for a in s.assignments)]
        return max(ends) if ends else None

    def describe(self) -> str:
        lines = []
        for s in self.segments:
            jobs = ", ".join(
                f"{a.job.id}@{self.platform.config_name(a.point.resources)}"
                for a in sorted(s.assignments, key=lambda a: a.job.id)
            )
            lines.append(f"[{s.start:.4g}, {s.end:.4g}): {jobs}")
        lines.append(f"total energy: {schedule_energy(self):.2f} J")
        return "\n".join(lines)


def check_structure(segments: Sequence[MappingSegment]) -> None:
    """Raise ModelError unless segments are ordered and contiguous."""
    for prev, cur in zip(segments, segments[1:]):
        if abs(prev.end - cur.start) > EPS:
            kind = "overlap" if cur.start < prev.end else "gap"
            raise ModelError(f"segments [{prev.start}, {prev.end}) and [{cur.start}, {cur.end}) {kind}")


def schedule_energy(schedule: Schedule | Sequence[MappingSegment]) -> float:
    segments = schedule.segments if isinstance(schedule, Schedule) else schedule
    check_structure(segments)
    return sum(s.energy() for s in segments)


def job_remaining_time(job: Job, point: OperatingPoint) -> float:
    return point.exec_time * job.remaining_ratio


def job_remaining_energy(job: Job, point: OperatingPoint) -> float:
    return point.energy * job.remaining_ratio


def pareto_filter(points: Sequence[OperatingPoint]) -> list[OperatingPoint]:
    """Drop dominated points, keeping input order.

    Exact duplicates do not dominate each other, so both survive.
    """
    if not points:
        raise ModelError("pareto_filter needs at least one point")
    return [p for p in points if not any(q.dominates(p) for q in points)]


@dataclass(frozen=True)
class Violation:
    constraint: str  # "2b".."2e" or "structure"
    message: str
    segment: int | None = None
    job_id: int | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(
            f"[{v.constraint}]"
            + (f" segment {v.segment}" if v.segment is not None else "")
            + (f" job {v.job_id}" if v.job_id is not None else "")
            + f": {v.message}"
            for v in self.violations
        )


def validate(schedule: Schedule, jobs: Iterable[Job], platform: Platform, t_now: float,
             eps: float = EPS) -> ValidationReport:
    """Check resource, uniqueness, progress and deadline constraints.

    Every violation found is reported; nothing short-circuits.
    """
    jobs = list(jobs)
    report = ValidationReport()
    add = report.violations.append
    by_id = {j.id: j for j in jobs}
    segs = schedule.segments

    if segs and abs(segs[0].start - t_now) > eps:
        add(Violation("structure", f"first segment starts at {segs[0].start}, expected {t_now}", 0))
    for i, (prev, cur) in enumerate(zip(segs, segs[1:])):
        if abs(prev.end - cur.start) > eps:
            add(Violation("structure", f"segment ends at {prev.end} but next starts at {cur.start}", i))

    progress = {j.id: 0.0 for j in jobs}
    last_end: dict[int, float] = {}
    for i, seg in enumerate(segs):
        used = seg.resource_usage(platform.m)
        if any(u > c for u, c in zip(used, platform.resource_counts)):
            add(Violation("2b", f"uses {used}, platform has {platform.resource_counts}", i))
        seen: set[int] = set()
        for a in seg.assignments:
            jid = a.job.id
            if jid in seen:
                add(Violation("2c", "job mapped more than once", i, jid))
            seen.add(jid)
            if jid not in by_id:
                add(Violation("2d", "mapping for a job outside the job set", i, jid))
                continue
            progress[jid] += seg.length / a.point.exec_time
            last_end[jid] = max(last_end.get(jid, seg.end), seg.end)

    for j in jobs:
        if abs(progress[j.id] - j.remaining_ratio) > eps:
            add(Violation("2d", f"runs {progress[j.id]:.12g} of remaining {j.remaining_ratio:.12g}",
                          job_id=j.id))
        if j.id in last_end and last_end[j.id] > j.deadline + eps:
            add(Violation("2e", f"finishes at {last_end[j.id]:.12g} after deadline {j.deadline}",
                          job_id=j.id))
    return report
