"""Benchmark CSV ingestion and aggregation.

This tool talks to the estimation package only through its published file
format, so the expected header is spelled out verbatim here. Aggregation
(sample std with lone rows reporting 0, failed rows dropped, log-log slope
per series) mirrors the producer's summarize output; a shared fixture in the
tests pins the two to 1e-12.
"""

from dataclasses import dataclass

import numpy as np

CSV_HEADER = "experiment,model,method,k,d,n,rep,seed,w1_error,hellinger,wall_time_s"


@dataclass(frozen=True)
class Record:
    experiment: str
    method: str
    n: int
    w1_error: float
    hellinger: float        # None when the field was empty
    wall_time_s: float


def read_records(csv_path: str):
    """Parse a results CSV. Malformed rows name the path and line number."""
    records = []
    with open(csv_path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{csv_path}:1: unexpected header {header!r}")
        for lineno, raw in enumerate(fh, 2):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 11:
                raise ValueError(f"{csv_path}:{lineno}: expected 11 fields, "
                                 f"got {len(parts)}")
            try:
                records.append(Record(
                    parts[0], parts[2], int(parts[5]), float(parts[8]),
                    float(parts[9]) if parts[9] else None, float(parts[10])))
            except ValueError as e:
                raise ValueError(f"{csv_path}:{lineno}: {e}") from None
    return records


@dataclass(frozen=True)
class SeriesPoint:
    """One aggregated (experiment, method, n) cell."""
    n: int
    count: int
    mean_w1: float
    std_w1: float
    mean_hellinger: float   # None when no row carried the field
    std_hellinger: float
    mean_wall_time_s: float


def _mean_std(vals):
    arr = np.asarray(vals, dtype=float)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(np.mean(arr)), std


def loglog_fit(ns, means):
    """Least-squares (slope, intercept) of log(mean) against log(n)."""
    pts = [(n, m) for n, m in zip(ns, means) if np.isfinite(m) and m > 0]
    if len(pts) < 2:
        return float("nan"), float("nan")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def loglog_slope(ns, means) -> float:
    """Least-squares slope of log(mean) against log(n)."""
    return loglog_fit(ns, means)[0]


def aggregate(records):
    """Group records into {(experiment, method): [SeriesPoint, ...]} by n.

    Rows with a non-finite w1_error are dropped before any averaging, the
    same rule the producer applies, so both sides of the pipeline agree on
    every mean. Series come back with their points sorted by n.
    """
    groups = {}
    for rec in records:
        if not np.isfinite(rec.w1_error):
            continue
        groups.setdefault((rec.experiment, rec.method), {}).setdefault(
            rec.n, []).append(rec)
    out = {}
    for key in sorted(groups):
        by_n = groups[key]
        pts = []
        for n in sorted(by_n):
            recs = by_n[n]
            mean_w1, std_w1 = _mean_std([r.w1_error for r in recs])
            hells = [r.hellinger for r in recs if r.hellinger is not None]
            mean_h, std_h = _mean_std(hells) if hells else (None, None)
            mean_wall = float(np.mean([r.wall_time_s for r in recs]))
            pts.append(SeriesPoint(n, len(recs), mean_w1, std_w1,
                                   mean_h, std_h, mean_wall))
        out[key] = pts
    return out


def series_slopes(agg):
    """Log-log slope of mean w1 vs n for each aggregated series."""
    return {key: loglog_slope([p.n for p in pts], [p.mean_w1 for p in pts])
            for key, pts in agg.items()}
