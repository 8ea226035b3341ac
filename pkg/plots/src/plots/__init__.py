"""Figures and tables from estimation benchmark CSVs.

Consumes the results format of the benchmark harness (header
experiment,model,method,k,d,n,rep,seed,w1_error,hellinger,wall_time_s) and
renders the publication artifacts: error curves with std bands, log-log rate
fits, and runtime summaries. Pure read -> render; input files are never
touched.
"""

from .figures import load_style, plot_errors, plot_rates, runtime_table
from .records import aggregate, loglog_fit, loglog_slope, read_records

__all__ = [
    "aggregate",
    "load_style",
    "loglog_fit",
    "loglog_slope",
    "plot_errors",
    "plot_rates",
    "read_records",
    "runtime_table",
]
