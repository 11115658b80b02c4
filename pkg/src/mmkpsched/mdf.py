"""MMKP-MDF: greedy knapsack mapping with Maximum-Difference-First job order.

Core types act as knapsacks whose capacity is core-seconds up to the latest
deadline; a configuration weighs ``cores * remaining_time`` per type. The job
whose best and second-best feasible configurations differ most in energy is
mapped first, trying its configurations from cheapest up until the EDF
packer accepts one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .edf import JobConfigMap, schedule_jobs
from .model import EPS, Job, Platform, Schedule


@dataclass
class Containers:
    capacity: list[float]

    @classmethod
    def initial(cls, jobs: Sequence[Job], platform: Platform, t_now: float) -> Containers:
        horizon = max(j.deadline - t_now for j in jobs)
        return cls([c * horizon for c in platform.resource_counts])

    def fits(self, weight: Sequence[float]) -> bool:
        return all(w <= c + EPS for w, c in zip(weight, self.capacity))

    def take(self, weight: Sequence[float]) -> None:
        self.capacity = [max(0.0, c - w) for c, w in zip(self.capacity, weight)]


@dataclass
class CandidateList:
    job: Job
    points: list[int] = field(default_factory=list)
    score: float = 0.0


def point_weight(job: Job, index: int) -> list[float]:
    p = job.app.points[index]
    t = p.exec_time * job.remaining_ratio
    return [r * t for r in p.resources]


def feasible_points(job: Job, containers: Containers, t_now: float, platform: Platform) -> list[int]:
    """Points meeting the deadline if started now and fitting the containers,
    cheapest remaining energy first."""
    slack = job.deadline - t_now
    ok = [
        k for k, p in enumerate(job.app.points)
        if p.exec_time * job.remaining_ratio <= slack + EPS
        and all(r <= c for r, c in zip(p.resources, platform.resource_counts))
        and containers.fits(point_weight(job, k))
    ]
    return sorted(ok, key=lambda k: (job.app.points[k].energy, k))


def next_job_mdf(jobs: Iterable[Job], jc: JobConfigMap, containers: Containers, t_now: float,
                 platform: Platform) -> CandidateList:
    best: Optional[CandidateList] = None
    best_key = None
    for job in sorted(jobs, key=lambda j: (j.deadline, j.id)):
        if jc.get(job.id) is not None:
            continue
        cl = feasible_points(job, containers, t_now, platform)
        if not cl:
            return CandidateList(job, [], -math.inf)
        if len(cl) == 1:
            score = math.inf
        else:
            e = [job.app.points[k].energy * job.remaining_ratio for k in cl[:2]]
            score = e[1] - e[0]
        # strictly greater keeps the earlier deadline / lower id on ties
        if best is None or score > best_key:
            best, best_key = CandidateList(job, cl, score), score
    if best is None:
        raise ValueError("next_job_mdf called with every job already mapped")
    return best


def mmkp_mdf(jobs: Iterable[Job], platform: Platform, t_now: float) -> Optional[Schedule]:
    jobs = list(jobs)
    if not jobs:
        return Schedule((), platform)
    containers = Containers.initial(jobs, platform, t_now)
    jc: dict[int, Optional[int]] = {j.id: None for j in jobs}
    kappa: Optional[Schedule] = None

    while any(v is None for v in jc.values()):
        cand = next_job_mdf(jobs, jc, containers, t_now, platform)
        job, cl = cand.job, list(cand.points)
        while jc[job.id] is None:
            if not cl:
                return None
            k = cl[0]
            trial = dict(jc)
            trial[job.id] = k
            sched = schedule_jobs(jobs, trial, platform, t_now)
            if sched is not None:
                jc, kappa = trial, sched
                containers.take(point_weight(job, k))
            else:
                cl.pop(0)
    return kappa
