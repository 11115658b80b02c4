"""Run the comparison on a generated suite and write records.csv / summary.json.

    python scripts/run_eval.py --out results/default
    python scripts/run_eval.py --count 1000 --seed 7 --algos mdf,lr,exmem,fixed --out results/big
"""

import argparse
import logging
import time
from pathlib import Path

from mmkpsched import io
from mmkpsched.evaluate import format_table, relative_energy_geomean, run_suite, timing_stats, write_outputs
from mmkpsched.workload import generate_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--profile", default="xu4_synthetic.json")
    ap.add_argument("--suite", help="suite JSON to use instead of generating one")
    ap.add_argument("--count", type=int, default=300)
    ap.add_argument("--seed", type=int, default=2020)
    ap.add_argument("--algos", default="mdf,lr,exmem")
    ap.add_argument("--node-budget", type=int, default=None)
    ap.add_argument("--out", default="results/default")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    profile = Path(args.profile) if Path(args.profile).exists() else io.bundled(args.profile)
    platform, apps = io.load_profiles(profile)
    if args.suite:
        cases = io.load_suite(args.suite, apps)
    else:
        cases = generate_suite(list(apps.values()), args.count, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_suite(out / "suite.json", cases)

    algos = args.algos.split(",")
    t0 = time.perf_counter()
    records = run_suite(cases, algos, platform, args.node_budget)
    logging.info("%d cases x %d algorithms in %.1f s", len(cases), len(algos), time.perf_counter() - t0)
    write_outputs(out, records)

    if "exmem" in algos:
        print("relative energy vs EX-MEM (geometric mean)")
        print(format_table(relative_energy_geomean(records)))
    print("\nmedian scheduling time [ms]")
    ts = timing_stats(records, by_jobs=True)
    for n in range(1, 5):
        print(f"{n} jobs  " + "  ".join(f"{a}={ts[(a, n)]['median']:.2f}" for a in algos if (a, n) in ts))
    for a in algos:
        ok = sum(r.feasible for r in records if r.algo == a)
        print(f"{a}: {ok}/{len(cases)} admitted")


if __name__ == "__main__":
    main()
