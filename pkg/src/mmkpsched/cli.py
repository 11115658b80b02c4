"""Command-line entry point.

Exit codes: 0 success, 1 validation found violations, 2 bad input,
3 the ``schedule`` request was rejected.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .algorithms import NAMES, get_scheduler
from .baselines import BudgetExceeded
from .evaluate import format_table, relative_energy_geomean, run_suite, write_outputs
from .model import ModelError, validate
from .workload import GeneratorMix, generate_suite, replay

log = logging.getLogger("mmkpsched")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_REJECTED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _resolve(path: str, flag: str) -> Path:
    """Accept a filesystem path or the name of a bundled data file."""
    p = Path(path)
    if p.exists():
        return p
    b = io.bundled(path)
    if b.exists():
        return b
    raise InputError(f"{flag} {path}: no such file")


def _load_profiles(args):
    try:
        return io.load_profiles(_resolve(args.profile, "--profile"))
    except (io.FormatError, ModelError) as e:
        raise InputError(f"--profile {args.profile}: {e}") from None


def _fmt_segment(seg, platform) -> str:
    jobs = ", ".join(f"{a.job.id}@{platform.config_name(a.point.resources)}"
                     for a in sorted(seg.assignments, key=lambda a: a.job.id))
    return f"[{seg.start:.4g}, {seg.end:.4g}): {jobs}"


def cmd_schedule(args) -> int:
    platform, apps = _load_profiles(args)
    try:
        case = io.load_case(_resolve(args.case, "--case"), apps)
    except (io.FormatError, ModelError) as e:
        raise InputError(f"--case {args.case}: {e}") from None
    try:
        sched = get_scheduler(args.algo, args.node_budget)(case.jobs, platform, case.t_now)
    except BudgetExceeded as e:
        print(f"{args.algo}: {e}")
        return EXIT_REJECTED
    if sched is None:
        print(f"{args.algo}: rejected (no feasible schedule for case {case.id})")
        return EXIT_REJECTED
    for seg in case.history:
        print(_fmt_segment(seg, platform) + "   (executed)")
    for seg in sched.segments:
        print(_fmt_segment(seg, platform))
    print(f"schedule energy: {sum(s.energy() for s in sched.segments):.2f} J")
    print(f"total energy: {case.total_energy(sched):.2f} J")
    if args.out:
        io.save_schedule(args.out, sched, apps)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        doc = io.load_schedule_doc(_resolve(args.schedule, "--schedule"))
        if args.profile:
            platform, apps = _load_profiles(args)
        else:
            platform, apps = io.profiles_from_dict(doc["profile"])
        case = io.load_case(_resolve(args.case, "--case"), apps)
        sched, _ = io.schedule_from_dict(doc, {j.id: j for j in case.jobs})
    except (io.FormatError, ModelError, KeyError) as e:
        raise InputError(f"--schedule {args.schedule} / --case {args.case}: {e}") from None
    report = validate(sched, case.jobs, platform, case.t_now)
    print(report)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_generate(args) -> int:
    platform, apps = _load_profiles(args)
    mix = GeneratorMix()
    if args.level:
        cells = {k: v for k, v in mix.cell_weights.items() if k[0] == args.level}
        total = sum(cells.values())
        mix.cell_weights = {k: v / total for k, v in cells.items()}
    if args.max_jobs:
        cells = {k: v for k, v in mix.cell_weights.items() if k[1] <= args.max_jobs}
        total = sum(cells.values())
        mix.cell_weights = {k: v / total for k, v in cells.items()}
    try:
        cases = generate_suite(list(apps.values()), args.count, mix, args.seed)
    except ValueError as e:
        raise InputError(str(e)) from None
    io.save_suite(args.out, cases)
    print(f"wrote {len(cases)} cases to {args.out}")
    return EXIT_OK


def cmd_replay(args) -> int:
    platform, apps = _load_profiles(args)
    try:
        trace = io.load_trace(_resolve(args.trace, "--trace"), apps)
    except (io.FormatError, ValueError) as e:
        raise InputError(f"--trace {args.trace}: {e}") from None
    result = replay(trace, get_scheduler(args.algo, args.node_budget), platform)
    for rec in result.activations:
        verdict = "admit" if rec.admitted else "reject"
        extra = f"  planned {rec.planned_energy:.2f} J" if rec.admitted else ""
        print(f"t={rec.time:g}  job {rec.job_id}: {verdict}{extra}")
        if rec.admitted:
            for seg in rec.schedule.segments:
                print("    " + _fmt_segment(seg, platform))
    for t, jid in result.completions:
        print(f"t={t:.4g}  job {jid} completed")
    print(f"total energy: {result.total_energy:.2f} J")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    platform, apps = _load_profiles(args)
    try:
        cases = io.load_suite(_resolve(args.suite, "--suite"), apps)
    except (io.FormatError, ModelError) as e:
        raise InputError(f"--suite {args.suite}: {e}") from None
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in NAMES]
    if bad:
        raise InputError(f"--algos: unknown algorithm(s) {', '.join(bad)}")
    log.info("running %d cases x %d algorithms", len(cases), len(algos))
    records = run_suite(cases, algos, platform, args.node_budget, args.workers)
    write_outputs(args.out, records, args.baseline)
    if args.baseline in algos:
        print(format_table(relative_energy_geomean(records, args.baseline)))
    print(f"wrote {args.out}/records.csv and {args.out}/summary.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mmkpsched", description="Segmented energy-aware multi-application scheduling")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, profile_required=True):
        p.add_argument("--profile", required=profile_required,
                       help="profile JSON (path or bundled name, e.g. motiv_example.json)")

    p = sub.add_parser("schedule", help="schedule one test case")
    common(p)
    p.add_argument("--case", required=True)
    p.add_argument("--algo", choices=NAMES, default="mdf")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--out", help="write the schedule as JSON")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("validate", help="check a schedule file against a case")
    common(p, profile_required=False)
    p.add_argument("--schedule", required=True)
    p.add_argument("--case", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="generate a test suite")
    common(p)
    p.add_argument("--count", type=int, default=300)
    p.add_argument("--seed", type=int, default=2020)
    p.add_argument("--level", choices=("weak", "tight"))
    p.add_argument("--max-jobs", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("replay", help="replay a request trace")
    common(p)
    p.add_argument("--trace", required=True)
    p.add_argument("--algo", choices=NAMES, default="mdf")
    p.add_argument("--node-budget", type=int, default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("evaluate", help="run algorithms over a suite")
    common(p)
    p.add_argument("--suite", required=True)
    p.add_argument("--algos", default="mdf,lr,exmem")
    p.add_argument("--baseline", default="exmem")
    p.add_argument("--node-budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
