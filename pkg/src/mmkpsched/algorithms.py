"""Name -> scheduler lookup shared by the CLI, replay and the harness."""

from __future__ import annotations

from functools import partial

from .baselines import ex_mem, fixed_mapper, mmkp_lr
from .mdf import mmkp_mdf

NAMES = ("mdf", "lr", "exmem", "fixed")


def get_scheduler(name: str, node_budget: int | None = None):
    if name == "mdf":
        return mmkp_mdf
    if name == "lr":
        return mmkp_lr
    if name == "exmem":
        return partial(ex_mem, node_budget=node_budget)
    if name == "fixed":
        return fixed_mapper
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(NAMES)}")
