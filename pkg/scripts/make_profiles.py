"""Regenerate the bundled synthetic big.LITTLE profiles (xu4_synthetic.json).

Each application is a parallel workload with a serial fraction; little and
big cores differ in speed and power, and the board draws static power while
the application runs. Eight configurations per application are kept and
Pareto-filtered.
"""

import argparse
import json
from pathlib import Path

from mmkpsched.model import OperatingPoint, pareto_filter

SPEED = {"L": 1.0, "B": 2.3}
POWER = {"L": 0.22, "B": 1.45}  # watts per busy core
STATIC = 0.9  # watts

APPS = {
    # name: (work in little-core seconds, serial fraction, configs to keep)
    "filter": (24.0, 0.05, [(1, 0), (2, 0), (4, 0), (0, 1), (2, 1), (4, 1), (2, 2), (4, 4)]),
    "detect": (30.0, 0.20, [(1, 0), (3, 0), (0, 1), (0, 2), (1, 1), (2, 2), (0, 4), (4, 2)]),
    "recog": (18.0, 0.10, [(2, 0), (4, 0), (0, 1), (1, 1), (3, 1), (1, 2), (0, 3), (4, 3)]),
}


def point(work, serial, n_little, n_big):
    fast = SPEED["B"] if n_big else SPEED["L"]
    total = n_little * SPEED["L"] + n_big * SPEED["B"]
    t = work * (serial / fast + (1 - serial) / total)
    p = STATIC + n_little * POWER["L"] + n_big * POWER["B"]
    return OperatingPoint((n_little, n_big), round(t, 3), round(p * t, 3))


def build():
    apps = []
    for name, (work, serial, configs) in APPS.items():
        pts = pareto_filter([point(work, serial, nl, nb) for nl, nb in configs])
        apps.append({"name": name, "points": [
            {"resources": list(p.resources), "exec_time_s": p.exec_time, "energy_j": p.energy}
            for p in pts]})
    return {"platform": {"type_names": ["L", "B"], "resource_counts": [4, 4]}, "applications": apps}


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src/mmkpsched/data/xu4_synthetic.json")
    args = ap.parse_args()
    doc = build()
    args.out.write_text(json.dumps(doc, indent=1) + "\n")
    for app in doc["applications"]:
        print(app["name"], [(p["resources"], p["exec_time_s"], p["energy_j"]) for p in app["points"]])
