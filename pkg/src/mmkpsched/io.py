"""JSON readers and writers for profiles, test cases, suites, traces and schedules."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

from .model import ApplicationProfile, Job, JobMapping, MappingSegment, OperatingPoint, Platform, Schedule
from .workload import RequestTrace, TestCase, TraceEvent


class FormatError(ValueError):
    pass


def bundled(name: str) -> Path:
    """Path of a data file shipped with the package, e.g. ``motiv_example.json``."""
    return Path(str(resources.files("mmkpsched") / "data" / name))


def _read(path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise FormatError(f"{path}: no such file") from None
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None


def _write(path, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


# profiles

def profiles_from_dict(doc: dict) -> tuple[Platform, dict[str, ApplicationProfile]]:
    try:
        plat = doc["platform"]
        platform = Platform(tuple(plat["resource_counts"]), tuple(plat["type_names"]))
        apps = {}
        for a in doc["applications"]:
            pts = tuple(OperatingPoint(tuple(p["resources"]), float(p["exec_time_s"]), float(p["energy_j"]))
                        for p in a["points"])
            if any(len(p.resources) != platform.m for p in pts):
                raise FormatError(f"application {a['name']!r}: resource vectors must have length {platform.m}")
            apps[a["name"]] = ApplicationProfile(a["name"], pts)
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed profile document: {e!r}") from None
    return platform, apps


def profiles_to_dict(platform: Platform, apps: dict[str, ApplicationProfile]) -> dict:
    return {
        "platform": {"type_names": list(platform.type_names), "resource_counts": list(platform.resource_counts)},
        "applications": [
            {"name": a.name, "points": [
                {"resources": list(p.resources), "exec_time_s": p.exec_time, "energy_j": p.energy}
                for p in a.points]}
            for a in apps.values()],
    }


def load_profiles(path) -> tuple[Platform, dict[str, ApplicationProfile]]:
    try:
        return profiles_from_dict(_read(path))
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


# test cases and suites

def case_to_dict(case: TestCase) -> dict:
    d = {"id": case.id, "level": case.deadline_level, "t_now": case.t_now, "seed": case.seed,
         "jobs": [{"id": j.id, "app": j.app.name, "arrival": j.arrival, "deadline": j.deadline,
                   "remaining_ratio": j.remaining_ratio} for j in case.jobs]}
    if case.history:
        d["history"] = _segments_to_list(case.history)
    if case.deadline_factors:
        d["deadline_factors"] = list(case.deadline_factors)
        d["reference_points"] = list(case.reference_points)
    return d


def case_from_dict(d: dict, apps: dict[str, ApplicationProfile]) -> TestCase:
    try:
        jobs = tuple(Job(int(j["id"]), float(j["arrival"]), float(j["deadline"]), apps[j["app"]],
                         float(j["remaining_ratio"])) for j in d["jobs"])
        by_id = {j.id: j for j in jobs}
        history = tuple(
            MappingSegment(float(s["start"]), float(s["end"]),
                           tuple(JobMapping(by_id[a["job"]], int(a["point"])) for a in s["assignments"]))
            for s in d.get("history", ()))
        return TestCase(str(d["id"]), jobs, d.get("level", "weak"), int(d.get("seed", 0)),
                        float(d.get("t_now", 0.0)),
                        tuple(d.get("deadline_factors", ())), tuple(d.get("reference_points", ())),
                        history)
    except KeyError as e:
        raise FormatError(f"case {d.get('id')!r}: unknown field or application {e}") from None


def load_case(path, apps) -> TestCase:
    try:
        return case_from_dict(_read(path), apps)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


def save_case(path, case: TestCase) -> None:
    _write(path, case_to_dict(case))


def load_suite(path, apps) -> list[TestCase]:
    doc = _read(path)
    items = doc["cases"] if isinstance(doc, dict) else doc
    try:
        return [case_from_dict(c, apps) for c in items]
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


def save_suite(path, cases) -> None:
    _write(path, {"cases": [case_to_dict(c) for c in cases]})


# traces

def load_trace(path, apps) -> RequestTrace:
    doc = _read(path)
    try:
        return RequestTrace(tuple(TraceEvent(float(e["arrival"]), apps[e["app"]], float(e["relative_deadline"]))
                                  for e in doc["events"]))
    except KeyError as e:
        raise FormatError(f"{path}: missing field or unknown application {e}") from None


def save_trace(path, trace: RequestTrace) -> None:
    _write(path, {"events": [{"arrival": e.arrival, "app": e.app.name, "relative_deadline": e.relative_deadline}
                             for e in trace.events]})


# schedules: self-contained, the profile document is embedded

def _segments_to_list(segments, platform: Platform | None = None) -> list:
    out = []
    for s in segments:
        items = []
        for a in s.assignments:
            item = {"job": a.job.id, "app": a.job.app.name, "point": a.point_index}
            if platform is not None:
                item["config"] = platform.config_name(a.point.resources)
            items.append(item)
        out.append({"start": s.start, "end": s.end, "assignments": items})
    return out


def schedule_to_dict(schedule: Schedule, apps: dict[str, ApplicationProfile]) -> dict:
    return {
        "profile": profiles_to_dict(schedule.platform, apps),
        "segments": _segments_to_list(schedule.segments, schedule.platform),
    }


def schedule_from_dict(doc: dict, jobs: dict[int, Job] | None = None) -> tuple[Schedule, dict]:
    """Rebuild a schedule. Jobs are taken from ``jobs`` by id when given,
    otherwise placeholder jobs are created from the embedded profile."""
    platform, apps = profiles_from_dict(doc["profile"])
    segs = []
    for s in doc["segments"]:
        maps = []
        for a in s["assignments"]:
            job = (jobs or {}).get(a["job"])
            if job is None:
                job = Job(int(a["job"]), float("-inf"), float("inf"), apps[a["app"]], 1.0)
            maps.append(JobMapping(job, int(a["point"])))
        segs.append(MappingSegment(float(s["start"]), float(s["end"]), tuple(maps)))
    return Schedule(tuple(segs), platform), apps


def save_schedule(path, schedule: Schedule, apps) -> None:
    _write(path, schedule_to_dict(schedule, apps))


def load_schedule_doc(path) -> dict:
    return _read(path)
