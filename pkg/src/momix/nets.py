"""Deterministic epsilon-coverings of the sphere, the simplex, and the ball.

All constructions are audited probe-based in the tests; sizes follow the
(C / eps)^(dim - 1) scaling with implementation-measured constants.
"""

import itertools
import math

import numpy as np

from .rng import stream


def sphere_net(dim: int, eps: float):
    """Covering of the unit sphere in R^dim at l2 radius eps.

    dim=1 is the two-point 0-sphere. dim=2 grids the angle with step
    2*arcsin(eps/2), the chord-length identity. Higher dimensions grid the
    spherical coordinates; each coordinate of the parameterization is
    1-Lipschitz, so a per-angle step of 2*eps/(dim-1) guarantees the radius.
    Returns an (m, dim) array of unit vectors.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if not 0 < eps:
        raise ValueError("eps must be positive")
    eps = min(eps, 2.0)
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if eps >= 2.0:
        out = np.zeros((1, dim))
        out[0, 0] = 1.0
        return out
    if dim == 2:
        step = 2.0 * math.asin(eps / 2.0)
        m = max(1, math.ceil(2.0 * math.pi / step))
        ang = 2.0 * math.pi * np.arange(m) / m
        return np.column_stack((np.cos(ang), np.sin(ang)))

    step = 2.0 * eps / (dim - 1)
    polar = _angle_grid(math.pi, step)            # angles in [0, pi]
    azimuth = _angle_grid(2.0 * math.pi, step)    # angle in [0, 2*pi)
    grids = [polar] * (dim - 2) + [azimuth]
    pts = []
    for angles in itertools.product(*grids):
        v = np.empty(dim)
        sin_prod = 1.0
        for i, a in enumerate(angles):
            v[i] = sin_prod * math.cos(a)
            sin_prod *= math.sin(a)
        v[dim - 1] = sin_prod
        pts.append(v)
    pts = np.unique(np.round(np.array(pts), 12), axis=0)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def _angle_grid(span, step):
    m = max(1, math.ceil(span / step))
    if span >= 2.0 * math.pi - 1e-12:
        return span * np.arange(m) / m          # periodic: omit the endpoint
    return span * np.arange(m + 1) / m


def simplex_net(k: int, eps: float):
    """l1-covering of the probability simplex at radius eps.

    Grids weights as compositions n/N with N = ceil(k / (2 eps)): rounding an
    arbitrary weight vector to this lattice (largest-remainder apportionment)
    moves it by at most k/(2N) <= eps in l1.
    Returns an (m, k) array of weight vectors.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if k == 1:
        return np.ones((1, 1))
    N = max(1, math.ceil(k / (2.0 * eps)))
    out = [np.array(c, dtype=float) / N for c in _compositions(N, k)]
    return np.array(out)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def ball_net(dim: int, eps: float, R: float):
    """l2-covering of the centered radius-R ball at radius eps.

    Cubic lattice with spacing 2*eps/sqrt(dim) (cell half-diagonal eps).
    Lattice points just outside the ball are clamped back to the sphere:
    clamping is the metric projection onto the ball, so it never increases the
    distance to any in-ball probe and the shell stays covered.
    Returns an (m, dim) array.
    """
    if eps <= 0 or R <= 0:
        raise ValueError("eps and R must be positive")
    h = 2.0 * eps / math.sqrt(dim)
    half = math.ceil((R + eps) / h)
    axis = h * np.arange(-half, half + 1)
    pts = []
    for p in itertools.product(axis, repeat=dim):
        v = np.array(p)
        r = np.linalg.norm(v)
        if r <= R:
            pts.append(v)
        elif r <= R + eps:
            pts.append(v * (R / r))
    pts = np.unique(np.round(np.array(pts), 12), axis=0)
    return pts


def covering_radius_estimate(net, sampler, n_probe: int, seed: int) -> float:
    """Max l2 distance from sampled probe points to the net.

    ``sampler(gen, n)`` must return an (n, dim) array of probes; the result is
    a probabilistic lower bound on the true covering radius.
    """
    net = np.atleast_2d(np.asarray(net, dtype=float))
    if net.shape[0] == 0:
        raise ValueError("net must be nonempty")
    gen = stream(seed)
    probes = np.asarray(sampler(gen, n_probe), dtype=float)
    net_sq = np.einsum("id,id->i", net, net)
    # chunk both axes: pairwise blocks capped near 16M doubles
    net_chunk = max(1, (1 << 24) // 512)
    worst = 0.0
    for block in np.array_split(probes, max(1, probes.shape[0] // 512)):
        block_sq = np.einsum("id,id->i", block, block)
        best = np.full(block.shape[0], np.inf)
        for lo in range(0, net.shape[0], net_chunk):
            chunk = net[lo:lo + net_chunk]
            d2 = (block_sq[:, None] - 2.0 * block @ chunk.T
                  + net_sq[lo:lo + net_chunk][None, :])
            np.minimum(best, d2.min(axis=1), out=best)
        worst = max(worst, float(np.sqrt(max(best.max(), 0.0))))
    return worst


def covering_radius_estimate_l1(net, sampler, n_probe: int, seed: int) -> float:
    """Probe-based covering radius in the l1 metric (for simplex nets)."""
    net = np.atleast_2d(np.asarray(net, dtype=float))
    if net.shape[0] == 0:
        raise ValueError("net must be nonempty")
    gen = stream(seed)
    probes = np.asarray(sampler(gen, n_probe), dtype=float)
    worst = 0.0
    for block in np.array_split(probes, max(1, probes.shape[0] // 256)):
        d = np.abs(block[:, None, :] - net[None, :, :]).sum(axis=2)
        worst = max(worst, float(d.min(axis=1).max()))
    return worst
