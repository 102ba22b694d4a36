from gramslice.output.csv_out import grid_csv, heatmap_csv, write_heatmaps, write_sweep
from gramslice.output.json_out import dumps, write_report, write_schedule, write_system, write_trace

__all__ = [
    "dumps",
    "grid_csv",
    "heatmap_csv",
    "write_heatmaps",
    "write_report",
    "write_schedule",
    "write_sweep",
    "write_system",
    "write_trace",
]
