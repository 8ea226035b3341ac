"""Render benchmark figures: error bands, rate fits, runtime tables.

Styling comes from the committed paper.style sheet next to this module, so
two machines rendering the same CSV produce the same file; run-dependent
metadata (timestamps, writer version) is stripped from the output.
"""

import os
import warnings
from importlib import resources

import matplotlib

matplotlib.use("Agg")   # batch renderer, never a display

import matplotlib.pyplot as plt
import numpy as np

from .records import aggregate, loglog_fit, read_records


def load_style(path: str | None = None) -> dict:
    """Read a flat key=value style sheet; defaults to the committed one."""
    if path is None:
        text = resources.files("plots").joinpath("paper.style").read_text("utf-8")
        path = "paper.style"
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    style = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        style[key.strip()] = val.strip()
    return style


def _rc(style: dict) -> dict:
    w, h = (float(v) for v in style["figsize"].split(","))
    return {
        "figure.figsize": (w, h),
        "figure.dpi": float(style["dpi"]),
        "savefig.dpi": float(style["dpi"]),
        "font.size": float(style["font_size"]),
        "svg.hashsalt": style["svg_hashsalt"],
        "svg.fonttype": "none",
        "axes.grid": True,
        "grid.alpha": float(style["grid_alpha"]),
    }


def _color(style: dict, method: str, idx: int) -> str:
    c = style.get(f"color.{method}")
    if c is None:
        cycle = style["color.fallback"].split(",")
        c = cycle[idx % len(cycle)].strip()
    return c


def _save(fig, out_path: str):
    ext = os.path.splitext(out_path)[1].lower()
    # run-dependent metadata would break byte-identical reruns
    if ext == ".svg":
        meta = {"Date": None}
    elif ext == ".png":
        meta = {"Software": None}
    else:
        meta = None
    fig.savefig(out_path, metadata=meta)
    plt.close(fig)


def plot_errors(csv_path: str, experiment: str, out_image: str,
                style_path: str | None = None):
    """Mean W1 error vs n for one experiment, a band of one sample std wide.

    One line plus shaded band per method. Returns the aggregates the figure
    was drawn from, as {method: [SeriesPoint, ...]} sorted by n.
    """
    style = load_style(style_path)
    agg = aggregate(read_records(csv_path))
    series = {m: pts for (exp, m), pts in agg.items() if exp == experiment}
    if not series:
        avail = sorted({exp for exp, _ in agg})
        raise ValueError(
            f"experiment {experiment!r} not in {csv_path} "
            f"(available: {', '.join(avail) if avail else 'none'})")
    with plt.rc_context(_rc(style)):
        fig, ax = plt.subplots()
        for i, method in enumerate(sorted(series)):
            pts = series[method]
            ns = np.array([p.n for p in pts], dtype=float)
            mean = np.array([p.mean_w1 for p in pts])
            std = np.array([p.std_w1 for p in pts])
            c = _color(style, method, i)
            ax.plot(ns, mean, marker=style["marker"],
                    markersize=float(style["marker_size"]),
                    linewidth=float(style["line_width"]),
                    color=c, label=method, gid=f"series-{method}")
            ax.fill_between(ns, mean - std, mean + std, color=c,
                            alpha=float(style["band_alpha"]), linewidth=0,
                            gid=f"band-{method}")
        ax.set_xlabel("n")
        ax.set_ylabel("W1 error")
        ax.set_title(experiment)
        ax.legend()
        _save(fig, out_image)
    return series


def plot_rates(csv_path: str, out_image: str, style_path: str | None = None):
    """Log-log scatter of mean W1 error vs n with a fitted power law per series.

    Every (experiment, method) series with at least two usable n points gets
    a scatter, a dashed least-squares fit, and its slope in the legend.
    Degenerate series are skipped with a warning. Returns the fitted slopes
    as {(experiment, method): slope}.
    """
    style = load_style(style_path)
    agg = aggregate(read_records(csv_path))
    drawn = {}
    with plt.rc_context(_rc(style)):
        fig, ax = plt.subplots()
        idx = 0
        for key in sorted(agg):
            exp, method = key
            pts = agg[key]
            ns = [p.n for p in pts]
            means = [p.mean_w1 for p in pts]
            slope, intercept = loglog_fit(ns, means)
            if not np.isfinite(slope):
                warnings.warn(f"skipping {exp}/{method}: fewer than two "
                              f"usable n points")
                continue
            c = _color(style, method, idx)
            ax.loglog(ns, means, linestyle="none", marker=style["marker"],
                      markersize=float(style["marker_size"]), color=c,
                      label=f"{exp} {method} (slope {slope:.3f})",
                      gid=f"points-{exp}-{method}")
            xs = np.array([min(ns), max(ns)], dtype=float)
            ax.loglog(xs, np.exp(intercept) * xs ** slope, linestyle="--",
                      linewidth=float(style["line_width"]), color=c,
                      gid=f"fit-{exp}-{method}")
            drawn[key] = slope
            idx += 1
        ax.set_xlabel("n")
        ax.set_ylabel("mean W1 error")
        if drawn:
            ax.legend(fontsize="small")
        _save(fig, out_image)
    return drawn


def runtime_table(csv_path: str, out_path: str):
    """Mean wall time in seconds per (experiment, method).

    Rows with a non-finite w1_error are dropped first, matching the
    aggregation rule everywhere else. Writes markdown when out_path ends in
    .md, CSV otherwise; either way the column order is fixed. Returns the
    rows as (experiment, method, mean_wall_time_s) tuples.
    """
    records = [r for r in read_records(csv_path) if np.isfinite(r.w1_error)]
    groups = {}
    for rec in records:
        groups.setdefault((rec.experiment, rec.method), []).append(
            rec.wall_time_s)
    rows = [(exp, method, float(np.mean(times)))
            for (exp, method), times in sorted(groups.items())]
    ext = os.path.splitext(out_path)[1].lower()
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        if ext == ".md":
            fh.write("| experiment | method | mean_wall_time_s |\n")
            fh.write("| --- | --- | --- |\n")
            for exp, method, mean in rows:
                fh.write(f"| {exp} | {method} | {mean:.4f} |\n")
        else:
            fh.write("experiment,method,mean_wall_time_s\n")
            for exp, method, mean in rows:
                fh.write(f"{exp},{method},{'%.17g' % mean}\n")
    return rows
