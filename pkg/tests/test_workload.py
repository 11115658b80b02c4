import math
import statistics

import pytest

from mmkpsched import io
from mmkpsched.algorithms import get_scheduler
from mmkpsched.baselines import ex_mem
from mmkpsched.model import EPS
from mmkpsched.workload import GeneratorMix, RequestTrace, TraceEvent, generate_suite, replay


def test_generator_deterministic(xu4):
    apps = list(xu4[1].values())
    a = generate_suite(apps, 10, seed=42)
    b = generate_suite(apps, 10, seed=42)
    assert [io.case_to_dict(c) for c in a] == [io.case_to_dict(c) for c in b]
    assert [io.case_to_dict(c) for c in generate_suite(apps, 10, seed=43)] != [io.case_to_dict(c) for c in a]


def test_generator_shape(xu4):
    apps = list(xu4[1].values())
    for c in generate_suite(apps, 300, seed=1):
        assert 1 <= c.job_count <= 4
        assert c.jobs[0].remaining_ratio == 1.0
        assert all(0.1 - 1e-12 <= j.remaining_ratio <= 1.0 for j in c.jobs)
        assert len({j.id for j in c.jobs}) == c.job_count
        assert all(j.arrival <= c.t_now < j.deadline for j in c.jobs)


def test_weak_jobs_individually_feasible(xu4):
    apps = list(xu4[1].values())
    mix = GeneratorMix(cell_weights={("weak", n): 0.25 for n in range(1, 5)})
    for c in generate_suite(apps, 200, mix, seed=9):
        for j, f, ref in zip(c.jobs, c.deadline_factors, c.reference_points):
            assert 2.0 <= f <= 6.0
            need = j.app.points[ref].exec_time * j.remaining_ratio
            assert c.t_now + need < j.deadline


def test_tight_suite_has_infeasible_cases(xu4):
    plat, apps = xu4
    mix = GeneratorMix(cell_weights={("tight", 2): 1.0})
    cases = generate_suite(list(apps.values()), 80, mix, seed=4)
    results = [ex_mem(c.jobs, plat, c.t_now) for c in cases]
    assert any(r is None for r in results)
    assert any(r is not None for r in results)


def test_generator_marginals(xu4):
    apps = list(xu4[1].values())
    mix = GeneratorMix(cell_weights={("weak", 4): 0.5, ("tight", 4): 0.5}, initial_state_share=0.0)
    cases = generate_suite(apps, 3400, mix, seed=123)
    progress = [1 - j.remaining_ratio for c in cases for j in c.jobs[1:]]
    assert len(progress) >= 10_000
    sigma = 0.9 / math.sqrt(12) / math.sqrt(len(progress))
    assert abs(statistics.fmean(progress) - 0.45) < 3 * sigma
    for c in cases:
        lo, hi = mix.factor_ranges[c.deadline_level]
        assert all(lo <= f <= hi for f in c.deadline_factors)


def test_generator_default_cells(xu4):
    apps = list(xu4[1].values())
    cases = generate_suite(apps, 2000, seed=8)
    single = sum(c.job_count == 1 for c in cases) / len(cases)
    assert single == pytest.approx(50 / 1676, abs=0.015)
    same_app = sum(len({j.app.name for j in c.jobs}) == 1 for c in cases if c.job_count > 1)
    assert same_app > 0


@pytest.mark.parametrize("mix", [
    GeneratorMix(cell_weights={("weak", 1): 0.5}),
    GeneratorMix(cell_weights={("weak", 5): 1.0}),
    GeneratorMix(single_app_share=1.5),
])
def test_invalid_mix(xu4, mix):
    with pytest.raises(ValueError):
        generate_suite(list(xu4[1].values()), 5, mix)


def test_generator_bad_args(xu4):
    with pytest.raises(ValueError):
        generate_suite(list(xu4[1].values()), 0)
    with pytest.raises(ValueError):
        generate_suite([], 3)


# ---------------------------------------------------------------- replay

def trace(motiv, d2):
    apps = motiv[1]
    return RequestTrace((TraceEvent(0.0, apps["lambda1"], 9.0), TraceEvent(1.0, apps["lambda2"], d2 - 1.0)))


def test_replay_s1_mdf(motiv):
    log = replay(trace(motiv, 5.0), get_scheduler("mdf"), motiv[0])
    assert [a.admitted for a in log.activations] == [True, True]
    sched_t1 = log.activations[1].schedule
    sigma1 = next(a.job for s in sched_t1.segments for a in s.assignments if a.job.id == 1)
    assert sigma1.remaining_ratio == pytest.approx(0.8113, abs=1e-4)
    assert log.total_energy == pytest.approx(1.679 + 12.95, abs=0.01)
    assert log.total_energy == pytest.approx(14.63, abs=0.01)


def test_replay_empty(motiv):
    log = replay(RequestTrace(()), get_scheduler("mdf"), motiv[0])
    assert log.activations == [] and log.total_energy == 0.0


def test_replay_fixed(motiv):
    s1 = replay(trace(motiv, 5.0), get_scheduler("fixed"), motiv[0])
    assert s1.total_energy == pytest.approx(16.96, abs=0.01)
    s2 = replay(trace(motiv, 4.0), get_scheduler("fixed"), motiv[0])
    assert [a.admitted for a in s2.activations] == [True, False]
    assert s2.total_energy == pytest.approx(8.90, abs=1e-9)
    s2_mdf = replay(trace(motiv, 4.0), get_scheduler("mdf"), motiv[0])
    assert [a.admitted for a in s2_mdf.activations] == [True, True]


@pytest.mark.parametrize("algo", ["mdf", "lr", "exmem", "fixed"])
def test_replay_progress_bookkeeping(xu4, algo):
    plat, apps = xu4
    names = sorted(apps)
    # arrivals 3 s apart, deadlines <= 12 s: at most four jobs alive at once
    events = tuple(TraceEvent(3.0 * i, apps[names[i % 3]], 6.0 + 2 * (i % 4)) for i in range(7))
    log = replay(RequestTrace(events), get_scheduler(algo), plat)
    done = {jid for _, jid in log.completions}
    admitted = {a.job_id for a in log.activations if a.admitted}
    assert done == admitted
    for jid, frac in log.consumed.items():
        assert frac <= 1 + EPS
        if jid in done:
            assert frac == pytest.approx(1.0, abs=1e-9)


def test_trace_order_enforced(motiv):
    app = motiv[1]["lambda1"]
    with pytest.raises(ValueError):
        RequestTrace((TraceEvent(2.0, app, 5.0), TraceEvent(1.0, app, 5.0)))


# ---------------------------------------------------------------- file formats

def test_suite_roundtrip(tmp_path, xu4):
    apps = xu4[1]
    cases = generate_suite(list(apps.values()), 25, seed=5)
    io.save_suite(tmp_path / "suite.json", cases)
    back = io.load_suite(tmp_path / "suite.json", apps)
    assert back == cases


def test_case_with_history_roundtrip(tmp_path, s1, motiv):
    io.save_case(tmp_path / "c.json", s1)
    back = io.load_case(tmp_path / "c.json", motiv[1])
    assert back == s1
    assert back.history_energy() == pytest.approx(8.9 / 5.3)


def test_trace_roundtrip(tmp_path, motiv):
    t = trace(motiv, 5.0)
    io.save_trace(tmp_path / "t.json", t)
    assert io.load_trace(tmp_path / "t.json", motiv[1]) == t
    assert io.load_trace(io.bundled("s1_trace.json"), motiv[1]) == t


def test_profile_roundtrip(tmp_path, motiv):
    plat, apps = motiv
    (tmp_path / "p.json").write_text(__import__("json").dumps(io.profiles_to_dict(plat, apps)))
    assert io.load_profiles(tmp_path / "p.json") == (plat, apps)


def test_bad_files(tmp_path, motiv):
    with pytest.raises(io.FormatError, match="nope.json"):
        io.load_profiles(tmp_path / "nope.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(io.FormatError, match="bad.json"):
        io.load_profiles(tmp_path / "bad.json")
    (tmp_path / "case.json").write_text('{"id": "x", "jobs": [{"id": 1, "app": "zzz", "arrival": 0,'
                                        ' "deadline": 1, "remaining_ratio": 1}]}')
    with pytest.raises(io.FormatError, match="case.json"):
        io.load_case(tmp_path / "case.json", motiv[1])
