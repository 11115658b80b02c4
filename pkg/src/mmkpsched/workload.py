"""Test-case generation and arrival-driven replay of request traces."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .model import EPS, ApplicationProfile, Job, MappingSegment, Platform, Schedule

Scheduler = Callable[[Sequence[Job], Platform, float], Optional[Schedule]]

LEVELS = ("weak", "tight")

# test cases per (level, job count) in the reference suite of 1676 cases
TABLE_COUNTS = {
    ("weak", 1): 15, ("weak", 2): 255, ("weak", 3): 255, ("weak", 4): 230,
    ("tight", 1): 35, ("tight", 2): 340, ("tight", 3): 340, ("tight", 4): 206,
}


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: str
    jobs: tuple[Job, ...]
    deadline_level: str
    seed: int
    t_now: float = 0.0
    deadline_factors: tuple[float, ...] = ()
    reference_points: tuple[int, ...] = ()
    history: tuple[MappingSegment, ...] = ()  # segments executed before t_now

    @property
    def job_count(self) -> int:
        return len(self.jobs)

    def history_energy(self) -> float:
        return sum(s.energy() for s in self.history)

    def total_energy(self, schedule: Schedule) -> float:
        """Energy of the executed history plus ``schedule``."""
        return self.history_energy() + sum(s.energy() for s in schedule.segments)


@dataclass
class GeneratorMix:
    """Sampling parameters; ``cell_weights`` must sum to 1."""

    cell_weights: dict = field(default_factory=lambda: {
        k: v / sum(TABLE_COUNTS.values()) for k, v in TABLE_COUNTS.items()})
    single_app_share: float = 0.319
    initial_state_share: float = 0.226
    max_progress: float = 0.9
    factor_ranges: dict = field(default_factory=lambda: {"weak": (2.0, 6.0), "tight": (0.6, 2.0)})

    def check(self) -> None:
        total = sum(self.cell_weights.values())
        if abs(total - 1.0) > 1e-6 or any(w < 0 for w in self.cell_weights.values()):
            raise ValueError(f"cell weights must be non-negative and sum to 1, got {total}")
        for lvl, n in self.cell_weights:
            if lvl not in LEVELS or not 1 <= n <= 4:
                raise ValueError(f"bad cell {(lvl, n)!r}: level in {LEVELS}, 1-4 jobs")
        for name in ("single_app_share", "initial_state_share"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")
        if not 0.0 <= self.max_progress < 1.0:
            raise ValueError("max_progress must be in [0, 1)")


def generate_suite(profiles: Sequence[ApplicationProfile], count: int,
                   mix: Optional[GeneratorMix] = None, seed: int = 0) -> list[TestCase]:
    """Sample ``count`` test cases at time 0.

    The first job of every case is fresh; the others carry a progress drawn
    uniformly from ``[0, max_progress]`` unless the case is an initial-state
    one. A job's deadline is its remaining time on a randomly picked point,
    scaled by a factor from the level's range.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    profiles = list(profiles)
    if not profiles:
        raise ValueError("need at least one application profile")
    mix = mix or GeneratorMix()
    mix.check()
    rng = random.Random(seed)
    cells = sorted(mix.cell_weights)
    weights = [mix.cell_weights[c] for c in cells]
    t_now = 0.0

    cases = []
    for n_case in range(count):
        level, n = rng.choices(cells, weights)[0]
        if n == 1 or rng.random() < mix.single_app_share:
            apps = [rng.choice(profiles)] * n
        else:
            apps = [rng.choice(profiles) for _ in range(n)]
        initial = rng.random() < mix.initial_state_share
        lo, hi = mix.factor_ranges[level]
        jobs, factors, refs = [], [], []
        for k, app in enumerate(apps):
            progress = 0.0 if (k == 0 or initial) else rng.uniform(0.0, mix.max_progress)
            rho = 1.0 - progress
            ref = rng.randrange(len(app.points))
            factor = rng.uniform(lo, hi)
            tau = app.points[ref].exec_time
            deadline = t_now + factor * tau * rho
            jobs.append(Job(k + 1, t_now - progress * tau, deadline, app, rho))
            factors.append(factor)
            refs.append(ref)
        cases.append(TestCase(f"{seed}-{n_case:05d}", tuple(jobs), level, seed, t_now,
                              tuple(factors), tuple(refs)))
    return cases


# ---------------------------------------------------------------- replay

@dataclass(frozen=True)
class TraceEvent:
    arrival: float
    app: ApplicationProfile
    relative_deadline: float


@dataclass(frozen=True)
class RequestTrace:
    events: tuple[TraceEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if any(b.arrival < a.arrival for a, b in zip(self.events, self.events[1:])):
            raise ValueError("trace arrival times must be non-decreasing")


@dataclass
class ActivationRecord:
    time: float
    job_id: int
    admitted: bool
    schedule: Optional[Schedule]
    planned_energy: Optional[float]  # energy of the adopted schedule from this time on


@dataclass
class ReplayLog:
    activations: list[ActivationRecord] = field(default_factory=list)
    completions: list[tuple[float, int]] = field(default_factory=list)
    consumed: dict[int, float] = field(default_factory=dict)  # fraction of full work done per job
    total_energy: float = 0.0


def replay(trace: RequestTrace, scheduler: Scheduler, platform: Platform) -> ReplayLog:
    """Run the resource manager over a trace, activating it at every arrival.

    On admission the new schedule replaces the current one; on rejection the
    current one keeps running. Energy is charged for executed time only, and
    the last schedule runs to completion after the final arrival.
    """
    log = ReplayLog()
    sched: Optional[Schedule] = None
    base: dict[int, Job] = {}  # jobs as they were when ``sched`` was adopted
    done: dict[int, float] = {}  # ratio executed since then
    clock = -math.inf

    def advance(until: float) -> None:
        nonlocal clock
        if sched is not None:
            for seg in sched.segments:
                lo, hi = max(seg.start, clock), min(seg.end, until)
                if hi <= lo:
                    continue
                for a in seg.assignments:
                    frac = (hi - lo) / a.point.exec_time
                    jid = a.job.id
                    done[jid] += frac
                    log.consumed[jid] = log.consumed.get(jid, 0.0) + frac
                    log.total_energy += a.point.energy * frac
                    if hi == seg.end and base[jid].remaining_ratio - done[jid] <= EPS \
                            and sched.finish_time(jid) == seg.end:
                        log.completions.append((seg.end, jid))
        clock = until

    next_id = 1
    for ev in trace.events:
        advance(ev.arrival)
        alive = [j.with_ratio(j.remaining_ratio - done[j.id]) for j in base.values()
                 if j.remaining_ratio - done[j.id] > EPS]
        new = Job(next_id, ev.arrival, ev.arrival + ev.relative_deadline, ev.app, 1.0)
        next_id += 1
        result = scheduler(alive + [new], platform, ev.arrival)
        if result is not None:
            sched = result
            base = {j.id: j for j in alive + [new]}
            done = {jid: 0.0 for jid in base}
            log.consumed.setdefault(new.id, 0.0)
            planned = sum(s.energy() for s in result.segments)
        else:
            planned = None
        log.activations.append(ActivationRecord(ev.arrival, new.id, result is not None, result, planned))
    advance(math.inf)
    return log
