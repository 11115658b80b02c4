"""EDF packing of jobs with fixed configurations into mapping segments."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from .model import EPS, Job, JobMapping, MappingSegment, ModelError, Platform, Schedule

# job id -> point index, None while unset
JobConfigMap = Mapping[int, Optional[int]]


def edf_key(job: Job):
    return (job.deadline, job.arrival, job.id)


def split_segment(segment: MappingSegment, at: float) -> tuple[MappingSegment, MappingSegment]:
    if not segment.start < at < segment.end:
        raise ModelError(f"split point {at} not inside [{segment.start}, {segment.end})")
    return (MappingSegment(segment.start, at, segment.assignments),
            MappingSegment(at, segment.end, segment.assignments))


def _fits(seg: MappingSegment, extra: tuple[int, ...], platform: Platform) -> bool:
    used = seg.resource_usage(platform.m)
    return all(u + e <= c for u, e, c in zip(used, extra, platform.resource_counts))


def schedule_jobs(jobs: Iterable[Job], jc: JobConfigMap, platform: Platform, t_now: float,
                  fixed: bool = False) -> Optional[Schedule]:
    """Pack every configured job in EDF order; None if a deadline is missed.

    Each job walks the existing segments in time order, joining those with
    enough free cores, until its remaining work is used up. A segment that
    outlasts the job is split at the job's finish time. Work left after the
    last segment goes into a new trailing segment.

    With ``fixed=True`` a job must run without interruption from ``t_now``:
    being blocked by resources in any segment it still needs rejects the
    whole configuration (the single-mapping baseline).
    """
    todo = sorted((j for j in jobs if jc.get(j.id) is not None), key=edf_key)
    kappa: list[MappingSegment] = []

    for job in todo:
        mapping = JobMapping(job, jc[job.id])
        point = mapping.point
        if any(r > c for r, c in zip(point.resources, platform.resource_counts)):
            return None
        rho = job.remaining_ratio
        finish = None
        i = 0
        while i < len(kappa):
            seg = kappa[i]
            if not _fits(seg, point.resources, platform):
                if fixed:
                    return None
                i += 1
                continue
            r = point.exec_time * rho
            if r >= seg.length - EPS:
                kappa[i] = seg.with_assignment(mapping)
                rho -= seg.length / point.exec_time
                if r <= seg.length + EPS:
                    rho = 0.0
                    finish = seg.end
                    break
            else:
                first, second = split_segment(seg, seg.start + r)
                kappa[i:i + 1] = [first.with_assignment(mapping), second]
                rho = 0.0
                finish = first.end
                break
            i += 1

        if rho > 0.0:
            r = point.exec_time * rho
            start = kappa[-1].end if kappa else t_now
            start = max(start, t_now)
            kappa.append(MappingSegment(start, start + r, (mapping,)))
            finish = start + r

        if finish is not None and finish > job.deadline + EPS:
            return None

    return Schedule(tuple(kappa), platform)
