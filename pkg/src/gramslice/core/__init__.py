from gramslice.core.scheduler import build_schedule, joint_schedule, separation_schedule
from gramslice.core.sparsifier import bss_pass, gen_dual_set
from gramslice.core.sweep import run_sweep

__all__ = [
    "bss_pass",
    "build_schedule",
    "gen_dual_set",
    "joint_schedule",
    "run_sweep",
    "separation_schedule",
]
