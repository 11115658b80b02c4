"""Suite runner and the aggregate metrics: success rate, relative-energy
geometric means, S-curves and scheduling-time summaries."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .algorithms import get_scheduler
from .baselines import BudgetExceeded
from .model import Platform, schedule_energy, validate
from .workload import LEVELS, TestCase


class ScheduleBug(AssertionError):
    """A scheduler returned a schedule that violates the constraints."""


@dataclass(frozen=True)
class EvalRecord:
    test_id: str
    algo: str
    feasible: bool
    energy: Optional[float]
    wall_time: float  # seconds
    job_count: int
    deadline_level: str
    reason: str = ""

    def __post_init__(self):
        if self.feasible != (self.energy is not None):
            raise ValueError("energy must be present iff the record is feasible")


def run_case(case: TestCase, algo: str, platform: Platform, node_budget: Optional[int] = None) -> EvalRecord:
    sched_fn = get_scheduler(algo, node_budget)
    reason = ""
    t0 = time.perf_counter()
    try:
        sched = sched_fn(case.jobs, platform, case.t_now)
    except BudgetExceeded as e:
        sched, reason = None, f"budget exceeded: {e}"
    wall = time.perf_counter() - t0
    if sched is None:
        return EvalRecord(case.id, algo, False, None, wall, case.job_count, case.deadline_level,
                          reason or "rejected")
    report = validate(sched, case.jobs, platform, case.t_now)
    if not report.ok:
        raise ScheduleBug(f"{algo} produced an invalid schedule for case {case.id}:\n{report}")
    return EvalRecord(case.id, algo, True, schedule_energy(sched), wall, case.job_count, case.deadline_level)


def run_suite(cases: Sequence[TestCase], algos: Sequence[str], platform: Platform,
              node_budget: Optional[int] = None, workers: int = 1) -> list[EvalRecord]:
    if not cases:
        raise ValueError("empty suite")
    tasks = [(c, a) for c in cases for a in algos]
    if workers <= 1:
        return [run_case(c, a, platform, node_budget) for c, a in tasks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda ca: run_case(ca[0], ca[1], platform, node_budget), tasks))


# ---------------------------------------------------------------- metrics

def energy_ratios(records: Iterable[EvalRecord], baseline: str) -> dict[str, list[tuple[EvalRecord, float]]]:
    """Per algorithm, (record, energy / baseline energy) over cases feasible under both."""
    records = list(records)
    base = {r.test_id: r.energy for r in records if r.algo == baseline and r.feasible}
    out = defaultdict(list)
    for r in records:
        if r.algo != baseline and r.feasible and r.test_id in base:
            out[r.algo].append((r, r.energy / base[r.test_id]))
    return dict(out)


def geomean(values: Sequence[float]) -> Optional[float]:
    if not values:
        return None
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))


def relative_energy_geomean(records: Iterable[EvalRecord], baseline: str = "exmem") -> dict:
    """Table keyed by algorithm: ``cells[(jobs, level)]``, ``by_level`` and ``overall``.

    Empty cells are None rather than 1.0.
    """
    table = {}
    for algo, pairs in energy_ratios(records, baseline).items():
        cells = defaultdict(list)
        by_level = defaultdict(list)
        for rec, ratio in pairs:
            cells[(rec.job_count, rec.deadline_level)].append(ratio)
            by_level[rec.deadline_level].append(ratio)
        table[algo] = {
            "cells": {(n, lvl): geomean(cells.get((n, lvl), [])) for n in range(1, 5) for lvl in LEVELS},
            "by_level": {lvl: geomean(by_level.get(lvl, [])) for lvl in LEVELS},
            "overall": geomean([r for _, r in pairs]),
        }
    return table


def scurve(records: Iterable[EvalRecord], baseline: str = "exmem") -> dict[str, list[float]]:
    return {algo: sorted(r for _, r in pairs) for algo, pairs in energy_ratios(records, baseline).items()}


def five_number(values: Sequence[float]) -> dict[str, float]:
    xs = sorted(values)
    if len(xs) == 1:
        q1 = q3 = xs[0]
    else:
        q1, _, q3 = statistics.quantiles(xs, n=4, method="inclusive")
    return {"mean": statistics.fmean(xs), "min": xs[0], "q1": q1, "median": statistics.median(xs),
            "q3": q3, "max": xs[-1]}


def timing_stats(records: Iterable[EvalRecord], by_jobs: bool = False) -> dict:
    """Wall-time summaries in milliseconds, per algorithm (and job count)."""
    groups = defaultdict(list)
    for r in records:
        groups[(r.algo, r.job_count) if by_jobs else r.algo].append(r.wall_time * 1e3)
    return {k: five_number(v) for k, v in groups.items()}


def success_rates(records: Iterable[EvalRecord]) -> dict:
    total, ok = defaultdict(int), defaultdict(int)
    for r in records:
        key = (r.algo, r.job_count, r.deadline_level)
        total[key] += 1
        ok[key] += r.feasible
    return {k: ok[k] / total[k] for k in total}


# ---------------------------------------------------------------- output

CSV_COLUMNS = ("test_id", "algo", "feasible", "energy_j", "wall_ms", "jobs", "level")


def write_csv(path, records: Iterable[EvalRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for r in records:
            w.writerow([r.test_id, r.algo, int(r.feasible), "" if r.energy is None else repr(r.energy),
                        f"{r.wall_time * 1e3:.6f}", r.job_count, r.deadline_level])


def read_csv(path) -> list[EvalRecord]:
    with open(path, newline="") as f:
        return [EvalRecord(row["test_id"], row["algo"], row["feasible"] == "1",
                           float(row["energy_j"]) if row["energy_j"] else None,
                           float(row["wall_ms"]) / 1e3, int(row["jobs"]), row["level"])
                for row in csv.DictReader(f)]


def summary(records: Sequence[EvalRecord], baseline: str = "exmem") -> dict:
    grid = relative_energy_geomean(records, baseline)
    return {
        "baseline": baseline,
        "geomean": {algo: {"cells": {f"{n}/{lvl}": v for (n, lvl), v in t["cells"].items()},
                           "by_level": t["by_level"], "overall": t["overall"]}
                    for algo, t in grid.items()},
        "scurve": scurve(records, baseline),
        "timing_ms": {f"{a}/{n}": s for (a, n), s in timing_stats(records, by_jobs=True).items()},
        "success_rate": {f"{a}/{n}/{lvl}": v for (a, n, lvl), v in success_rates(records).items()},
    }


def write_outputs(out_dir, records: Sequence[EvalRecord], baseline: str = "exmem") -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "records.csv", records)
    doc = summary(records, baseline)
    (out / "summary.json").write_text(json.dumps(doc, indent=1) + "\n")
    return doc


def format_table(grid: dict) -> str:
    """Plain-text version of the relative-energy table."""
    algos = sorted(grid)
    lines = ["jobs  " + "  ".join(f"{a + '/' + lvl:>12}" for a in algos for lvl in LEVELS)]
    fmt = lambda v: f"{v:12.4f}" if v is not None else f"{'-':>12}"
    for n in range(1, 5):
        lines.append(f"{n:<4}  " + "  ".join(fmt(grid[a]["cells"][(n, lvl)]) for a in algos for lvl in LEVELS))
    lines.append("all   " + "  ".join(fmt(grid[a]["by_level"][lvl]) for a in algos for lvl in LEVELS))
    lines.append("overall " + "  ".join(f"{a}={fmt(grid[a]['overall']).strip()}" for a in algos))
    return "\n".join(lines)


def records_to_dicts(records):
    return [asdict(r) for r in records]
