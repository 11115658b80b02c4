"""Energy-aware scheduling of firm real-time jobs on heterogeneous multi-cores
using mapping segments."""

from .baselines import BudgetExceeded, ExMemSolver, ex_mem, fixed_mapper, mmkp_lr
from .edf import schedule_jobs, split_segment
from .mdf import mmkp_mdf, next_job_mdf
from .model import (
    EPS, ApplicationProfile, Job, JobMapping, MappingSegment, OperatingPoint, Platform, Schedule,
    job_remaining_time, pareto_filter, schedule_energy, validate,
)

__version__ = "0.1.0"
