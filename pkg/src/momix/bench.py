"""Benchmark harness: seeded experiment grids, CSV persistence, aggregation.

A run is described by a flat key=value config (keys are exactly the
ExperimentConfig field names). Every (n, rep) task derives its own seed from
the base seed, so results are independent of worker count and rerunning a
config reproduces the CSV byte for byte (set timing=false to freeze the
wall_time_s column too).
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, fields
from time import perf_counter

import numpy as np

from .density import density_estimate_2gm, density_estimate_kgm
from .distributions import DiscreteDistribution, GaussianMixture, sample, w1_exact
from .em import em_fit
from .mixing import estimate
from .rng import derive_seed, stream
from .tensors import hellinger_mc

CSV_HEADER = "experiment,model,method,k,d,n,rep,seed,w1_error,hellinger,wall_time_s"
SUMMARY_HEADER = ("experiment,method,n,count,mean_w1,std_w1,mean_hellinger,"
                  "std_hellinger,mean_wall_time_s,slope_w1")
KNOWN_METHODS = ("dmm", "em", "density2gm", "densitykgm")
HELLINGER_MC = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark run: an experiment id, a grid of n, and method choices."""

    experiment: str
    k: int
    d: int
    n: tuple
    reps: int
    seed: int
    R: float
    C1: float = 1.0
    C2: float = 2.0
    methods: tuple = ("dmm",)
    center: bool = True
    split: bool = False
    model: str = ""          # registry id; empty means the experiment id itself
    hellinger: bool = False
    timing: bool = True
    grid_scale: float = 1.0
    budget: int = 5_000_000

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(v) for v in self.n))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.experiment:
            raise ValueError("experiment id must be nonempty")
        if self.k < 1 or self.d < 1:
            raise ValueError("k and d must be >= 1")
        if len(self.n) == 0 or self.n[0] <= 0 or any(
                b <= a for a, b in zip(self.n, self.n[1:])):
            raise ValueError("n must be a positive increasing sequence")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.R <= 0:
            raise ValueError("R must be positive")
        bad = [m for m in self.methods if m not in KNOWN_METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; known: {KNOWN_METHODS}")
        model_registry(self.model or self.experiment)   # fail fast on unknown id

    @property
    def model_id(self) -> str:
        return self.model or self.experiment


@dataclass(frozen=True)
class ResultRecord:
    """One CSV row: a single method fit on a single draw."""

    experiment: str
    model: str
    method: str
    k: int
    d: int
    n: int
    rep: int
    seed: int
    w1_error: float
    hellinger: float            # None when not requested
    wall_time_s: float

    def to_csv_row(self) -> str:
        hell = "" if self.hellinger is None else _fmt(self.hellinger)
        return (f"{self.experiment},{self.model},{self.method},{self.k},{self.d},"
                f"{self.n},{self.rep},{self.seed},{_fmt(self.w1_error)},{hell},"
                f"{_fmt(self.wall_time_s)}")


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


# ---------------------------------------------------------------------------
# config files

_INT_FIELDS = {"k", "d", "reps", "seed", "budget"}
_FLOAT_FIELDS = {"R", "C1", "C2", "grid_scale"}
_BOOL_FIELDS = {"center", "split", "hellinger", "timing"}
_REQUIRED = ("experiment", "k", "d", "n", "reps", "seed", "R")


def parse_config(path: str) -> ExperimentConfig:
    """Read a flat key=value config file. Unknown or duplicate keys rejected."""
    names = {f.name for f in fields(ExperimentConfig)}
    kwargs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in names:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in kwargs:
                raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
            kwargs[key] = _parse_value(key, val, path, lineno)
    missing = [k for k in _REQUIRED if k not in kwargs]
    if missing:
        raise ValueError(f"{path}: missing required keys {missing}")
    return ExperimentConfig(**kwargs)


def _parse_value(key, val, path, lineno):
    try:
        if key in _INT_FIELDS:
            return int(val)
        if key in _FLOAT_FIELDS:
            return float(val)
        if key in _BOOL_FIELDS:
            if val.lower() in ("true", "false"):
                return val.lower() == "true"
            raise ValueError("expected true or false")
        if key == "n":
            return tuple(int(v) for v in val.split(","))
        if key == "methods":
            return tuple(v.strip() for v in val.split(",") if v.strip())
        return val
    except ValueError as e:
        raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {e}") from None


# ---------------------------------------------------------------------------
# model registry

def _unit_vector(rng, d):
    v = rng.standard_normal(d)
    nrm = np.linalg.norm(v)
    while nrm < 1e-12:          # astronomically unlikely; keeps the draw valid
        v = rng.standard_normal(d)
        nrm = np.linalg.norm(v)
    return v / nrm


def _two_point(radius, w_plus):
    def make(d, seed):
        rng = stream(seed, "model")
        mu = _unit_vector(rng, d) * radius
        return DiscreteDistribution(np.vstack((mu, -mu)), [w_plus, 1.0 - w_plus])
    return make


def _three_point(radius):
    def make(d, seed):
        rng = stream(seed, "model")
        mu = _unit_vector(rng, d) * radius
        return DiscreteDistribution(np.vstack((-mu, np.zeros(d), mu)),
                                    [1.0 / 3] * 3)
    return make


def _dirichlet_three(d, seed):
    rng = stream(seed, "model")
    atoms = np.vstack([_unit_vector(rng, d) for _ in range(3)])
    return DiscreteDistribution(atoms, rng.dirichlet([1.0, 1.0, 1.0]))


_REGISTRY = {
    "k2a": _two_point(0.0, 0.5),
    "k2b": _two_point(1.0, 0.5),
    "k2c": _two_point(2.0, 0.5),
    "k2d": _two_point(2.0, 0.25),
    "k3a": _three_point(0.0),
    "k3b": _three_point(1.0),
    "k3c": _three_point(2.0),
    "k02_k3": _two_point(2.0, 0.5),     # 2-component data, fit with k=3
    "dirichlet": _dirichlet_three,
}


def model_registry(model_id: str):
    """The model generator for an experiment id: a callable (d, seed) -> mixing."""
    try:
        return _REGISTRY[model_id]
    except KeyError:
        raise ValueError(f"unknown model id {model_id!r}; known: "
                         f"{sorted(_REGISTRY)}") from None


# ---------------------------------------------------------------------------
# running

def _fit(method, X, config, seed) -> DiscreteDistribution:
    if method == "dmm":
        return estimate(X, config.k, config.R, center=config.center,
                        split=config.split, C1=config.C1, C2=config.C2)
    if method == "em":
        return em_fit(X, config.k, derive_seed(seed, "em"))
    if method == "density2gm":
        return density_estimate_2gm(X, config.R, split=config.split).mixing
    if method == "densitykgm":
        return density_estimate_kgm(X, config.k, config.R,
                                    grid_scale=config.grid_scale,
                                    budget=config.budget, C2=config.C2).mixing
    raise ValueError(f"unknown method {method!r}")


def _run_task(config: ExperimentConfig, n: int, rep: int):
    seed = derive_seed(config.seed, config.experiment, n, rep)
    make = model_registry(config.model_id)
    truth = make(config.d, seed)
    X = sample(GaussianMixture(truth), n, derive_seed(seed, "data"))
    rows = []
    for method in config.methods:
        t0 = perf_counter()
        try:
            fit = _fit(method, X, config, seed)
            w1 = w1_exact(fit, truth)
        except Exception:
            fit, w1 = None, float("nan")
        wall = perf_counter() - t0 if config.timing else 0.0
        hell = None
        if config.hellinger and fit is not None:
            h2, _ = hellinger_mc(GaussianMixture(fit), GaussianMixture(truth),
                                 n_mc=HELLINGER_MC,
                                 seed=derive_seed(seed, "hellinger", method))
            hell = math.sqrt(max(h2, 0.0))
        rows.append(ResultRecord(config.experiment, config.model_id, method,
                                 config.k, config.d, n, rep, seed, w1, hell, wall))
    return rows


def run_experiment(config: ExperimentConfig, out_path: str, threads: int = 1):
    """Run the whole grid, appending CSV rows as tasks finish.

    Tasks (one per (n, rep), covering every method on shared data) run in a
    thread pool, but rows are written strictly in task order and flushed
    after each task, so the CSV is both incrementally recoverable and
    independent of `threads`. Estimator failures become rows with w1_error
    nan and the run continues. Returns all records in file order.
    """
    tasks = [(n, rep) for n in config.n for rep in range(config.reps)]
    results = {}
    records = []
    try:
        out = open(out_path, "w", encoding="utf-8", newline="\n")
    except OSError as e:
        raise OSError(f"cannot open output CSV {out_path!r}: {e}") from e
    with out:
        out.write(CSV_HEADER + "\n")
        out.flush()
        next_up = 0
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            futs = {pool.submit(_run_task, config, n, rep): i
                    for i, (n, rep) in enumerate(tasks)}
            for fut in as_completed(futs):
                results[futs[fut]] = fut.result()
                while next_up in results:
                    for rec in results.pop(next_up):
                        out.write(rec.to_csv_row() + "\n")
                        records.append(rec)
                    out.flush()
                    next_up += 1
    return records


# ---------------------------------------------------------------------------
# summaries

def parse_records(csv_path: str):
    """Read a results CSV back into ResultRecord objects.

    Malformed rows raise ValueError naming the path and line number.
    """
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
                records.append(ResultRecord(
                    parts[0], parts[1], parts[2], int(parts[3]), int(parts[4]),
                    int(parts[5]), int(parts[6]), int(parts[7]), float(parts[8]),
                    float(parts[9]) if parts[9] else None, float(parts[10])))
            except ValueError as e:
                raise ValueError(f"{csv_path}:{lineno}: {e}") from None
    return records


@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    method: str
    n: int
    count: int                  # rows with a finite w1_error
    mean_w1: float
    std_w1: float
    mean_hellinger: float       # None when no hellinger values present
    std_hellinger: float
    mean_wall_time_s: float
    slope_w1: float             # shared across the (experiment, method) group

    def to_csv_row(self) -> str:
        mh = "" if self.mean_hellinger is None else _fmt(self.mean_hellinger)
        sh = "" if self.std_hellinger is None else _fmt(self.std_hellinger)
        return (f"{self.experiment},{self.method},{self.n},{self.count},"
                f"{_fmt(self.mean_w1)},{_fmt(self.std_w1)},{mh},{sh},"
                f"{_fmt(self.mean_wall_time_s)},{_fmt(self.slope_w1)}")


def _mean_std(vals):
    if len(vals) == 0:
        return float("nan"), float("nan")
    arr = np.asarray(vals, dtype=float)
    # lone rows report zero spread rather than an undefined sample std
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
    return float(np.mean(arr)), std


def loglog_slope(ns, means) -> float:
    """Least-squares slope of log(mean) against log(n)."""
    pts = [(n, m) for n, m in zip(ns, means) if np.isfinite(m) and m > 0]
    if len(pts) < 2:
        return float("nan")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    return float(np.polyfit(x, y, 1)[0])


def summarize(csv_path: str):
    """Aggregate a results CSV into per-(experiment, method, n) rows.

    Means and sample standard deviations cover rows whose w1_error is finite
    (failed rows are excluded); wall time averages over the same rows. Each
    group also carries the log-log slope of mean w1 against n across that
    (experiment, method) pair. Rows come back sorted by experiment, method, n.
    """
    records = parse_records(csv_path)
    groups = {}
    for rec in records:
        if not np.isfinite(rec.w1_error):
            continue
        groups.setdefault((rec.experiment, rec.method), {}).setdefault(
            rec.n, []).append(rec)
    out = []
    for (exp, method) in sorted(groups):
        by_n = groups[(exp, method)]
        ns = sorted(by_n)
        means = []
        rows = []
        for n in ns:
            recs = by_n[n]
            mean_w1, std_w1 = _mean_std([r.w1_error for r in recs])
            hells = [r.hellinger for r in recs if r.hellinger is not None]
            mean_h, std_h = _mean_std(hells) if hells else (None, None)
            mean_wall = float(np.mean([r.wall_time_s for r in recs]))
            means.append(mean_w1)
            rows.append((n, len(recs), mean_w1, std_w1, mean_h, std_h, mean_wall))
        slope = loglog_slope(ns, means)
        for n, count, mean_w1, std_w1, mean_h, std_h, mean_wall in rows:
            out.append(SummaryRow(exp, method, n, count, mean_w1, std_w1,
                                  mean_h, std_h, mean_wall, slope))
    return out


def write_summary(rows, out_path: str):
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv_row() + "\n")


def default_out_path(config: ExperimentConfig, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, f"{config.experiment}.csv")
