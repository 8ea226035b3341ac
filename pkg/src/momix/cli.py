"""Command-line front end: run benchmarks, fit, compare, summarize."""

import argparse
import math
import sys

import numpy as np

from .bench import (default_out_path, parse_config, run_experiment, summarize,
                    write_summary)
from .distributions import DiscreteDistribution, sliced_w1, w1_exact
from .em import em_fit
from .mixing import estimate
from .nets import sphere_net
from .tensors import frob_dist_max


def read_distribution(path: str) -> DiscreteDistribution:
    """Parse the text distribution format: `k d`, then k lines `w mu_1 .. mu_d`."""
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().split()
        if len(head) != 2:
            raise ValueError(f"{path}:1: expected 'k d'")
        k, d = int(head[0]), int(head[1])
        atoms = np.empty((k, d))
        weights = np.empty(k)
        for i in range(k):
            parts = fh.readline().split()
            if len(parts) != d + 1:
                raise ValueError(f"{path}:{i + 2}: expected {d + 1} numbers, "
                                 f"got {len(parts)}")
            weights[i] = float(parts[0])
            atoms[i] = [float(v) for v in parts[1:]]
    return DiscreteDistribution(atoms, weights)


def write_distribution(gamma: DiscreteDistribution, path: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{gamma.k} {gamma.dim}\n")
        for w, mu in zip(gamma.weights, gamma.atoms):
            fh.write(" ".join("%.17g" % v for v in [w, *mu]) + "\n")


def _load_matrix(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        X = np.load(path)
    else:
        X = np.loadtxt(path, delimiter=",", ndmin=2)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    out_path = default_out_path(config, args.out)
    records = run_experiment(config, out_path, threads=args.threads)
    print(f"{len(records)} records -> {out_path}")
    return 0


def _cmd_estimate(args) -> int:
    X = _load_matrix(args.input)
    if args.method == "dmm":
        fit = estimate(X, args.k, args.radius)
    else:
        fit = em_fit(X, args.k, args.seed)
    write_distribution(fit, args.out)
    print(f"{fit.k} atoms -> {args.out}")
    return 0


def _sliced_net_size(dim: int, eps: float) -> int:
    """Predict sphere_net's raw grid size without materializing it."""
    eps = min(eps, 2.0)
    if dim == 1:
        return 2
    if eps >= 2.0:
        return 1
    if dim == 2:
        return max(1, math.ceil(2.0 * math.pi / (2.0 * math.asin(eps / 2.0))))
    step = 2.0 * eps / (dim - 1)
    polar = max(1, math.ceil(math.pi / step)) + 1
    azimuth = max(1, math.ceil(2.0 * math.pi / step))
    return polar ** (dim - 2) * azimuth


def _cmd_distance(args) -> int:
    a = read_distribution(args.a)
    b = read_distribution(args.b)
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if args.metric == "w1":
        val = w1_exact(a, b)
    elif args.metric == "sliced":
        size = _sliced_net_size(a.dim, args.net_eps)
        # direction nets are exponential in dim; refuse sizes that cannot fit
        if size > 5_000_000:
            raise ValueError(
                f"a {args.net_eps:g}-resolution direction net in dimension "
                f"{a.dim} needs ~{size:.1e} points; raise --net-eps (net "
                f"size grows like (1/eps)^(dim-1))")
        val = sliced_w1(a, b, sphere_net(a.dim, args.net_eps))
    else:
        val = frob_dist_max(a, b, 2 * max(a.k, b.k) - 1)
    print("%.17g" % val)
    return 0


def _cmd_summarize(args) -> int:
    rows = summarize(args.in_path)
    write_summary(rows, args.out)
    print(f"{len(rows)} summary rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="momix",
                                description="Gaussian mixture estimation benchmarks")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("run", help="run a benchmark config, writing a results CSV")
    q.add_argument("--config", required=True)
    q.add_argument("--out", required=True, help="output directory")
    q.add_argument("--threads", type=int, default=1)
    q.set_defaults(func=_cmd_run)

    q = sub.add_parser("estimate", help="fit a mixing distribution to a sample matrix")
    q.add_argument("--input", required=True, help="csv matrix or .npy file, rows = samples")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--radius", type=float, required=True)
    q.add_argument("--method", choices=("dmm", "em"), default="dmm")
    q.add_argument("--seed", type=int, default=0, help="EM initialization seed")
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_estimate)

    q = sub.add_parser("distance", help="distance between two distribution files")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--metric", choices=("w1", "sliced", "frob"), default="w1")
    q.add_argument("--net-eps", type=float, default=0.1,
                   help="direction net resolution for the sliced metric")
    q.set_defaults(func=_cmd_distance)

    q = sub.add_parser("summarize", help="aggregate a results CSV")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_summarize)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
