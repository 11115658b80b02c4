"""Acceptance criteria 1-7. Each test records a PASS/FAIL line (shown in the
terminal summary) and then asserts, so failures are reported honestly."""

import itertools
import random
import time

import pytest

from mmkpsched import io
from mmkpsched.baselines import ex_mem, fixed_mapper, mmkp_lr
from mmkpsched.edf import split_segment
from mmkpsched.evaluate import relative_energy_geomean, run_suite, timing_stats
from mmkpsched.mdf import mmkp_mdf
from mmkpsched.model import EPS, Job, JobMapping, MappingSegment, pareto_filter, schedule_energy, validate
from mmkpsched.workload import GeneratorMix, generate_suite, replay
from conftest import ACCEPTANCE
from test_model import PROGRESS, MOTIV_L1, dominated_brute

DEFAULT_SEED, DEFAULT_COUNT = 2020, 300


def report(n, ok, detail):
    ACCEPTANCE.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    print(ACCEPTANCE[-1])
    assert ok, detail


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def default_records(xu4):
    plat, apps = xu4
    cases = generate_suite(list(apps.values()), DEFAULT_COUNT, seed=DEFAULT_SEED)
    return cases, run_suite(cases, ["mdf", "lr", "exmem"], plat)


def test_criterion_1_motivational_optimum(s1, motiv):
    plat = motiv[0]
    sched, t_mdf = timed(mmkp_mdf, s1.jobs, plat, s1.t_now)
    rho1 = next(j.remaining_ratio for j in s1.jobs if j.id == 1)
    e_mdf = s1.total_energy(sched)
    opt, t_ex = timed(ex_mem, s1.jobs, plat, s1.t_now)
    e_ex = s1.total_energy(opt)
    ok = (validate(sched, s1.jobs, plat, s1.t_now).ok and abs(rho1 - 0.8113) < 1e-4
          and abs(e_mdf - 14.63) <= 0.01 and abs(e_ex - e_mdf) <= 1e-9 and max(t_mdf, t_ex) < 1.0)
    report(1, ok, f"rho1={rho1:.4f} MDF={e_mdf:.4f} J EX-MEM={e_ex:.4f} J "
                  f"(MDF {t_mdf * 1e3:.1f} ms, EX-MEM {t_ex * 1e3:.1f} ms)")


def test_criterion_2_fixed_mapper_contrast(motiv, s2):
    plat, apps = motiv
    s1_trace = io.load_trace(io.bundled("s1_trace.json"), apps)
    s2_trace = io.load_trace(io.bundled("s2_trace.json"), apps)
    fixed_s1 = replay(s1_trace, fixed_mapper, plat)
    fixed_s2 = replay(s2_trace, fixed_mapper, plat)
    mdf_s2 = mmkp_mdf(s2.jobs, plat, s2.t_now)
    ok = (abs(fixed_s1.total_energy - 16.96) <= 0.01
          and [a.admitted for a in fixed_s2.activations] == [True, False]
          and fixed_mapper(s2.jobs, plat, s2.t_now) is None
          and mdf_s2 is not None and validate(mdf_s2, s2.jobs, plat, s2.t_now).ok)
    report(2, ok, f"fixed S1={fixed_s1.total_energy:.4f} J, fixed admits S2 sigma2: "
                  f"{fixed_s2.activations[-1].admitted}, MDF admits S2: {mdf_s2 is not None}")


def test_criterion_3_single_job_optimality(xu4):
    plat, apps = xu4
    cells = {("weak", 1): 0.5, ("tight", 1): 0.5}
    cases = generate_suite(list(apps.values()), 200, GeneratorMix(cell_weights=cells), seed=33)
    mismatches, feasible = [], 0
    for c in cases:
        res = [f(c.jobs, plat, c.t_now) for f in (mmkp_mdf, mmkp_lr, ex_mem)]
        if res[2] is None:
            if any(r is not None for r in res[:2]):
                mismatches.append(c.id)
            continue
        feasible += 1
        energies = [None if r is None else schedule_energy(r) for r in res]
        if not energies[0] == energies[1] == energies[2]:
            mismatches.append(c.id)
    levels = {c.deadline_level for c in cases}
    ok = not mismatches and levels == {"weak", "tight"} and feasible > 0
    report(3, ok, f"200 single-job cases, {feasible} feasible, {len(mismatches)} mismatches {mismatches[:5]}")


def test_criterion_4_oracle_dominance(xu4):
    plat, apps = xu4
    cells = {k: v for k, v in GeneratorMix().cell_weights.items() if k[1] <= 3}
    total = sum(cells.values())
    mix = GeneratorMix(cell_weights={k: v / total for k, v in cells.items()})
    cases = generate_suite(list(apps.values()), 500, mix, seed=44)
    algos = ["mdf", "lr", "exmem", "fixed"]
    t0 = time.perf_counter()
    records = run_suite(cases, algos, plat)  # raises ScheduleBug on any validator violation
    elapsed = time.perf_counter() - t0
    base = {r.test_id: r.energy for r in records if r.algo == "exmem" and r.feasible}
    worst = min((r.energy / base[r.test_id] for r in records
                 if r.feasible and r.algo != "exmem" and r.test_id in base), default=1.0)
    orphan = [r for r in records if r.feasible and r.test_id not in base]
    succ = {a: sum(r.feasible for r in records if r.algo == a) for a in algos}
    ok = (worst >= 1 - 1e-9 and not orphan and all(succ["exmem"] >= succ[a] for a in algos)
          and elapsed < 600 and all(len(a.points) <= 8 for a in apps.values()))
    report(4, ok, f"500 cases <=3 jobs, all schedules valid, min ratio vs EX-MEM {worst:.12f}, "
                  f"successes {succ}, {elapsed:.1f} s")


def test_criterion_5_relative_ordering(default_records):
    _, records = default_records
    grid = relative_energy_geomean(records, "exmem")
    bad, shown = [], []
    for n in (2, 3, 4):
        for lvl in ("weak", "tight"):
            m, l = grid["mdf"]["cells"][(n, lvl)], grid["lr"]["cells"][(n, lvl)]
            shown.append(f"{n}/{lvl}: {m:.4f}<={l:.4f}" if m is not None and l is not None else f"{n}/{lvl}: -")
            if m is None or l is None or m > l:
                bad.append((n, lvl))
    report(5, not bad, f"seed {DEFAULT_SEED}, {DEFAULT_COUNT} cases; " + ", ".join(shown)
           + f"; overall MDF {grid['mdf']['overall']:.4f} LR {grid['lr']['overall']:.4f}")


def test_criterion_6_overhead_ordering(default_records, xu4):
    _, records = default_records
    ts = timing_stats(records, by_jobs=True)
    med = {(a, n): ts[(a, n)]["median"] for a in ("mdf", "lr", "exmem") for n in (3, 4)}
    ordered = all(med[("mdf", n)] < med[("lr", n)] < med[("exmem", n)] for n in (3, 4))
    # MDF on every 4-job case of the default suite plus 200 extra ones
    plat, apps = xu4
    extra = generate_suite(list(apps.values()), 200,
                           GeneratorMix(cell_weights={("weak", 4): 0.5, ("tight", 4): 0.5}), seed=66)
    cases = [c for c in default_records[0] if c.job_count == 4] + extra
    worst = max(timed(mmkp_mdf, c.jobs, plat, c.t_now)[1] for c in cases)
    ok = ordered and worst < 0.050
    report(6, ok, "median ms " + ", ".join(f"{n} jobs: MDF {med[('mdf', n)]:.2f} < LR {med[('lr', n)]:.2f}"
                                           f" < EX-MEM {med[('exmem', n)]:.2f}" for n in (3, 4))
           + f"; MDF worst 4-job case {worst * 1e3:.2f} ms over {len(cases)} cases")


def test_criterion_7_invariants(motiv, xu4):
    plat, apps = motiv
    # Pareto filter vs brute force over all subsets of the table's point sets
    subsets = 0
    pareto_ok = True
    for app in apps.values():
        pts = list(app.points)
        for r in range(1, len(pts) + 1):
            for sub in itertools.combinations(pts, r):
                dom = dominated_brute(list(sub))
                pareto_ok &= pareto_filter(list(sub)) == [p for i, p in enumerate(sub) if i not in dom]
                subsets += 1
    # split additivity
    rng = random.Random(77)
    jobs = [Job(i, 0, 99, apps[n], 1.0) for i, n in enumerate(sorted(apps))]
    worst_split, splits = 0.0, 0
    while splits < 1000:
        maps = tuple(JobMapping(j, rng.randrange(len(j.app.points))) for j in jobs if rng.random() < 0.7)
        start = rng.uniform(0, 10)
        s = MappingSegment(start, start + rng.uniform(0.01, 10), maps)
        at = rng.uniform(s.start, s.end)
        if not s.start < at < s.end:
            continue
        a, b = split_segment(s, at)
        worst_split = max(worst_split, abs(a.energy() + b.energy() - s.energy()))
        splits += 1
    # linear scaling of the printed triples
    worst_scale = max(abs(vals[col] - vals[0] * (1 - PROGRESS[col])) / (vals[0] * (1 - PROGRESS[col]))
                      for taus, xis in MOTIV_L1.values() for vals in (taus, xis) for col in (1, 2))
    # generator determinism
    profiles = list(xu4[1].values())
    dump = lambda cs: [io.case_to_dict(c) for c in cs]
    determinism = dump(generate_suite(profiles, 50, seed=42)) == dump(generate_suite(profiles, 50, seed=42))
    ok = pareto_ok and worst_split <= EPS and worst_scale <= 0.01 and determinism
    report(7, ok, f"pareto {subsets} subsets ok={pareto_ok}; {splits} splits max err {worst_split:.2e}; "
                  f"linear scaling max rel err {worst_scale:.4f}; determinism {determinism}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
