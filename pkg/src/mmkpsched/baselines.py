"""Comparison schedulers: EX-MEM (exhaustive oracle), MMKP-LR, fixed mapping."""

from __future__ import annotations

import bisect
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .edf import schedule_jobs
from .model import EPS, Job, JobMapping, MappingSegment, Platform, Schedule

QUANTUM = 1e-9

log = logging.getLogger(__name__)


class BudgetExceeded(RuntimeError):
    """EX-MEM expanded more search nodes than allowed."""


def _q(x: float) -> int:
    return round(x / QUANTUM)


def _fits_platform(point, platform: Platform) -> bool:
    return all(r <= c for r, c in zip(point.resources, platform.resource_counts))


# ---------------------------------------------------------------- EX-MEM

class _EnergyCurve:
    """Least energy per unit of progress when the average time per unit may
    not exceed ``w``: the lower convex hull of the (time, energy) points,
    cut at its minimum-energy vertex. Infinite below the fastest point."""

    def __init__(self, points):
        hull: list[tuple[float, float]] = []
        for tau, xi in sorted(points):
            if hull and xi >= hull[-1][1]:
                continue  # slower and not cheaper
            while len(hull) >= 2:
                (t1, e1), (t2, e2) = hull[-2], hull[-1]
                if (e2 - e1) * (tau - t1) >= (xi - e1) * (t2 - t1):
                    hull.pop()
                else:
                    break
            hull.append((tau, xi))
        self.taus = [t for t, _ in hull]
        self.hull = hull

    def __call__(self, w: float) -> float:
        if not self.hull or w < self.taus[0]:
            return math.inf
        i = bisect.bisect_right(self.taus, w)
        if i == len(self.hull):
            return self.hull[-1][1]
        (t1, e1), (t2, e2) = self.hull[i - 1], self.hull[i]
        return e1 + (e2 - e1) * (w - t1) / (t2 - t1)


@dataclass
class _Choice:
    assignment: tuple[tuple[int, int], ...]  # (job position, point index)
    length: float


class ExMemSolver:
    """Segment-by-segment exhaustive search with memoization.

    At each state every live job is either suspended or runs on one of its
    points; the segment is cut when the first running job completes. The
    best remaining energy per state ``(time, remaining ratios)`` is cached.
    A lower bound prunes branches that cannot beat the incumbent: each job
    alone, free to mix its points in any proportion, must still meet its
    deadline. The memo keeps exact values and proven lower bounds apart.
    An optional ``upper_bound`` (the energy of any known feasible schedule)
    seeds the incumbent.

    The memo persists across ``solve`` calls on the same instance.
    """

    def __init__(self, node_budget: Optional[int] = None):
        self.node_budget = node_budget
        self.nodes = 0
        self._memo: dict = {}
        self._signature = None

    def solve(self, jobs: Iterable[Job], platform: Platform, t_now: float,
              upper_bound: float = math.inf) -> Optional[Schedule]:
        jobs = sorted(jobs, key=lambda j: j.id)
        sig = (tuple((j.id, j.deadline, j.remaining_ratio, id(j.app)) for j in jobs), platform, t_now)
        if sig != self._signature:
            self._memo.clear()
            self._signature = sig
        self._jobs = jobs
        self._platform = platform
        self._usable = [[k for k, p in enumerate(j.app.points) if _fits_platform(p, platform)]
                        for j in jobs]
        self._curve = [_EnergyCurve([(j.app.points[k].exec_time, j.app.points[k].energy) for k in ks])
                       for j, ks in zip(jobs, self._usable)]
        self._fastest = [min((j.app.points[k].exec_time for k in ks), default=math.inf)
                         for j, ks in zip(jobs, self._usable)]
        self._deadline = [j.deadline for j in jobs]
        self._points = [[(p.exec_time, p.energy) for p in j.app.points] for j in jobs]
        self._assign_cache = {}

        live = tuple((pos, j.remaining_ratio) for pos, j in enumerate(jobs))
        value, exact = self._value(t_now, live, upper_bound * (1 + 1e-9) + 1e-12)
        if not exact:  # the hint was not attainable after all
            value, _ = self._value(t_now, live, math.inf)
        if math.isinf(value):
            return None
        return self._rebuild(t_now, live)

    # state helpers
    def _key(self, t, live):
        return _q(t), tuple((self._jobs[p].id, _q(r)) for p, r in live)

    def _lower_bound(self, t, live) -> float:
        total = 0.0
        for p, r in live:
            total += r * self._curve[p]((self._jobs[p].deadline - t + EPS) / r)
        return total

    def _doomed(self, t, live) -> bool:
        return any(t + self._fastest[p] * r > self._jobs[p].deadline + EPS for p, r in live)

    def _assignments(self, positions):
        """All (position, point or None) tuples respecting core counts with at
        least one job running. Depends only on which jobs are live, so cached."""
        hit = self._assign_cache.get(positions)
        if hit is not None:
            return hit
        caps = self._platform.resource_counts
        out: list = []

        def rec(i, used, acc):
            if i == len(positions):
                if any(k is not None for _, k in acc):
                    out.append(tuple((p, k) for p, k in acc if k is not None))
                return
            pos = positions[i]
            acc.append((pos, None))
            rec(i + 1, used, acc)
            acc.pop()
            for k in self._usable[pos]:
                res = self._jobs[pos].app.points[k].resources
                nu = tuple(u + r for u, r in zip(used, res))
                if all(u <= c for u, c in zip(nu, caps)):
                    acc.append((pos, k))
                    rec(i + 1, nu, acc)
                    acc.pop()

        rec(0, (0,) * len(caps), [])
        self._assign_cache[positions] = out
        return out

    def _children(self, t, live, ub):
        """Children sorted by lower bound; those whose bound reaches ``ub``
        are dropped. Returns (children, any_dropped)."""
        ratio = dict(live)
        deadline = self._deadline
        pts = self._points
        kids = []
        dropped = False
        for assign in self._assignments(tuple(ratio)):
            length = min(pts[p][k][0] * ratio[p] for p, k in assign)
            end = t + length
            seg_e = 0.0
            nxt = dict(ratio)
            late = False
            for p, k in assign:
                tau, xi = pts[p][k]
                if end > deadline[p] + EPS:
                    late = True
                    break
                seg_e += xi * length / tau
                left = ratio[p] - length / tau
                if tau * left <= EPS:
                    del nxt[p]
                else:
                    nxt[p] = left
            if late:
                continue
            bound = seg_e + self._lower_bound(end, nxt.items())
            if math.isinf(bound):
                continue  # some job can no longer meet its deadline
            if bound >= ub - EPS * 1e-3:
                dropped = True
                continue
            kids.append((bound, seg_e, end, tuple(nxt.items()), _Choice(assign, length)))
        kids.sort(key=lambda c: c[0])
        return kids, dropped

    def _value(self, t, live, ub):
        """Return (value, exact). If not exact, value is a lower bound >= ub."""
        if not live:
            return 0.0, True
        key = self._key(t, live)
        hit = self._memo.get(key)
        if hit is not None:
            val, exact, _ = hit
            if exact or val >= ub:
                return val, exact
        if self._doomed(t, live):
            self._memo[key] = (math.inf, True, None)
            return math.inf, True

        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise BudgetExceeded(f"EX-MEM exceeded node budget {self.node_budget}")

        kids, dropped = self._children(t, live, ub)
        best, choice, complete = math.inf, None, not dropped
        for bound, seg_e, end, child, ch in kids:
            limit = min(ub, best)
            if bound >= limit - EPS * 1e-3 and not math.isinf(limit):
                complete = False
                break
            v, exact = self._value(end, child, limit - seg_e)
            if not exact:
                complete = False
                continue
            if seg_e + v < best:
                best, choice = seg_e + v, ch

        if best < ub or complete:
            self._memo[key] = (best, True, choice)
            return best, True
        prev = self._memo.get(key)
        lb = ub if prev is None else max(prev[0], ub)
        self._memo[key] = (lb, False, None)
        return lb, False

    def _rebuild(self, t, live) -> Schedule:
        segs = []
        while live:
            _, _, choice = self._memo[self._key(t, live)]
            ratio = dict(live)
            end = t + choice.length
            maps = []
            for p, k in choice.assignment:
                job = self._jobs[p]
                maps.append(JobMapping(job, k))
                pt = job.app.points[k]
                left = ratio[p] - choice.length / pt.exec_time
                if pt.exec_time * left <= EPS:
                    del ratio[p]
                else:
                    ratio[p] = left
            segs.append(MappingSegment(t, end, tuple(maps)))
            t, live = end, tuple(ratio.items())
        return Schedule(tuple(segs), self._platform)


def ex_mem(jobs: Iterable[Job], platform: Platform, t_now: float,
           node_budget: Optional[int] = None) -> Optional[Schedule]:
    """Optimal schedule, or None if none exists. MDF's result (which lies in
    the search space) is used as the starting incumbent."""
    from .mdf import mmkp_mdf
    from .model import schedule_energy

    jobs = list(jobs)
    hint = mmkp_mdf(jobs, platform, t_now)
    ub = math.inf if hint is None else schedule_energy(hint)
    return ExMemSolver(node_budget).solve(jobs, platform, t_now, ub)


# ---------------------------------------------------------------- MMKP-LR

@dataclass
class LrMultipliers:
    values: list[float]
    bound: float = -math.inf
    iterations: int = 0


def subgradient_multipliers(costs: Sequence[Sequence[float]],
                            weights: Sequence[Sequence[Sequence[int]]],
                            capacity: Sequence[int],
                            max_iter: int = 100) -> LrMultipliers:
    """Projected subgradient ascent on the Lagrangian dual of an MMKP.

    ``costs[i][p]`` and ``weights[i][p]`` describe item ``p`` of group ``i``;
    exactly one item per group is chosen subject to summed weights within
    ``capacity``. Returns the multipliers with the best dual bound found.
    """
    m = len(capacity)
    lam = [0.0] * m
    best = LrMultipliers(list(lam))
    upper = sum(max(c) for c in costs)
    scale, stall = 2.0, 0

    for it in range(max_iter):
        dual = -sum(l * c for l, c in zip(lam, capacity))
        usage = [0.0] * m
        primal = 0.0
        for cs, ws in zip(costs, weights):
            red = [c + sum(l * w for l, w in zip(lam, wv)) for c, wv in zip(cs, ws)]
            k = min(range(len(red)), key=red.__getitem__)
            dual += red[k]
            primal += cs[k]
            for r in range(m):
                usage[r] += ws[k][r]
        g = [u - c for u, c in zip(usage, capacity)]
        if all(x <= 0 for x in g):
            upper = min(upper, primal)

        if dual > best.bound + 1e-12:
            best = LrMultipliers(list(lam), dual, it + 1)
            stall = 0
        else:
            stall += 1
            if stall >= 5:
                scale, stall = scale / 2, 0
        best.iterations = it + 1

        norm2 = sum(x * x for x in g)
        gap = upper - dual
        if norm2 == 0 or gap <= 1e-9 * max(1.0, abs(upper)):
            break
        step = scale * abs(gap) / norm2
        lam = [max(0.0, l + step * x) for l, x in zip(lam, g)]
    return best


def mmkp_lr(jobs: Iterable[Job], platform: Platform, t_now: float,
            max_iter: int = 100) -> Optional[Schedule]:
    """Segment-at-a-time Lagrangian-relaxation mapper.

    Each segment solves the relaxed per-segment MMKP for multipliers, maps
    jobs in ascending order of their cheapest Lagrangian cost, and closes the
    segment at the first completion. A point is admitted if the job meets its
    deadline either staying on it or switching to its fastest point when the
    segment closes.
    """
    live = {j.id: j for j in jobs}
    ratio = {j.id: j.remaining_ratio for j in live.values()}
    caps = platform.resource_counts
    t = t_now
    segs: list[MappingSegment] = []

    while live:
        order_ids = sorted(live)
        cands, fastest = {}, {}
        for jid in order_ids:
            job, rho = live[jid], ratio[jid]
            usable = [k for k, p in enumerate(job.app.points) if _fits_platform(p, platform)]
            if not usable:
                return None
            fastest[jid] = min(job.app.points[k].exec_time for k in usable)
            if t + fastest[jid] * rho > job.deadline + EPS:
                log.debug("lr: job %d cannot meet its deadline at segment %d", jid, len(segs))
                return None
            on_time = [k for k in usable if t + job.app.points[k].exec_time * rho <= job.deadline + EPS]
            cands[jid] = on_time or usable

        costs = [[live[j].app.points[k].energy * ratio[j] for k in cands[j]] for j in order_ids]
        weights = [[live[j].app.points[k].resources for k in cands[j]] for j in order_ids]
        lam = subgradient_multipliers(costs, weights, caps, max_iter).values

        def lcost(jid, k):
            p = live[jid].app.points[k]
            return p.energy * ratio[jid] + sum(l * r for l, r in zip(lam, p.resources))

        usable_all = {jid: [k for k, p in enumerate(live[jid].app.points) if _fits_platform(p, platform)]
                      for jid in order_ids}
        ranked = {jid: sorted(usable_all[jid], key=lambda k, jid=jid: (lcost(jid, k), k))
                  for jid in order_ids}
        job_order = sorted(order_ids, key=lambda jid: (lcost(jid, ranked[jid][0]), live[jid].deadline, jid))

        used = [0] * len(caps)
        placed: list[JobMapping] = []
        close = math.inf
        for jid in job_order:
            job, rho = live[jid], ratio[jid]
            for k in ranked[jid]:
                p = job.app.points[k]
                if any(u + r > c for u, r, c in zip(used, p.resources, caps)):
                    continue
                own = t + p.exec_time * rho
                if own <= job.deadline + EPS:
                    break
                e = min(close, own)
                left = rho - (e - t) / p.exec_time
                if e + fastest[jid] * left <= job.deadline + EPS:
                    break
            else:
                log.debug("lr: no admissible point for job %d at segment %d", jid, len(segs))
                return None
            used = [u + r for u, r in zip(used, p.resources)]
            placed.append(JobMapping(job, k))
            close = min(close, own)

        seg = MappingSegment(t, close, tuple(placed))
        segs.append(seg)
        for a in placed:
            jid = a.job.id
            left = ratio[jid] - seg.length / a.point.exec_time
            if a.point.exec_time * left <= EPS:
                del live[jid], ratio[jid]
            else:
                ratio[jid] = left
        t = close
    return Schedule(tuple(segs), platform)


# ---------------------------------------------------------------- fixed mapping

def fixed_mapper(jobs: Iterable[Job], platform: Platform, t_now: float) -> Optional[Schedule]:
    """Cheapest single mapping: every job keeps one configuration and runs
    uninterrupted from ``t_now``, all jobs side by side."""
    jobs = list(jobs)
    if not jobs:
        return Schedule((), platform)
    options = []
    for j in jobs:
        ks = [k for k, p in enumerate(j.app.points)
              if _fits_platform(p, platform) and t_now + p.exec_time * j.remaining_ratio <= j.deadline + EPS]
        if not ks:
            return None
        options.append(ks)
    combos = sorted(
        itertools.product(*options),
        key=lambda ks: (sum(j.app.points[k].energy * j.remaining_ratio for j, k in zip(jobs, ks)), ks),
    )
    for ks in combos:
        sched = schedule_jobs(jobs, {j.id: k for j, k in zip(jobs, ks)}, platform, t_now, fixed=True)
        if sched is not None:
            return sched
    return None

