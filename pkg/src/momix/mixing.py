"""The two-stage mixing-distribution estimator.

Stage one reduces the sample to k (or k-1, after centering) dimensions by PCA
on the shifted covariance. Stage two runs the low-dimensional grid search:
denoised method of moments on every coordinate builds a candidate atom set,
and the candidate distribution whose projections best match per-direction DMM
fits (in 1-d Wasserstein distance, maximized over a sphere net) wins.
"""

import itertools
import math

import numpy as np

from .distributions import DiscreteDistribution
from .moments import MomentVector, dmm_1d, dmm_from_moments
from .nets import simplex_net, sphere_net
from .spectral import covariance_shifted, lift_dist, top_subspace


def grid_eps(n: int, k: int) -> float:
    """The accuracy target n^(-1/(4k-2)) the nets are sized against."""
    return float(n) ** (-1.0 / (4 * k - 2))


def candidate_set(marginal_supports, weight_net, k: int):
    """All k-atomic candidates from marginal supports and a weight net.

    Atom tuples are k-subsets of the Cartesian product of the per-coordinate
    supports (subsets with repetition when the product holds fewer than k
    points); every weight vector in the net is paired with every atom tuple.
    Returns a list of DiscreteDistribution in deterministic enumeration order
    (atom subsets outer, weight vectors inner).
    """
    positions, weights = _candidate_arrays(marginal_supports, weight_net, k)
    return [DiscreteDistribution(p, w) for p, w in zip(positions, weights)]


def _candidate_arrays(marginal_supports, weight_net, k):
    """Raw (S, k, r) atom and (S, k) weight arrays behind candidate_set."""
    supports = [np.asarray(s, dtype=float).ravel() for s in marginal_supports]
    if any(s.size == 0 for s in supports):
        raise ValueError("every marginal support must be nonempty")
    grid = np.array(list(itertools.product(*supports)))  # (|A|, r)
    if grid.shape[0] >= k:
        subsets = list(itertools.combinations(range(grid.shape[0]), k))
    else:
        subsets = list(itertools.combinations_with_replacement(range(grid.shape[0]), k))
    weight_net = np.atleast_2d(np.asarray(weight_net, dtype=float))
    n_s, n_w = len(subsets), weight_net.shape[0]
    positions = grid[np.array(subsets)]                  # (n_s, k, r)
    positions = np.repeat(positions, n_w, axis=0)
    weights = np.tile(weight_net, (n_s, 1))
    return positions, weights


def _clip_to_ball(points, R):
    norms = np.linalg.norm(points, axis=-1, keepdims=True)
    scale = np.minimum(1.0, R / np.maximum(norms, 1e-300))
    return points * scale


def _directional_moments(x, thetas, r_max, chunk=32):
    """Unbiased moment estimates of the projections x @ theta, batched.

    The Hermite recurrence runs on whole (n, chunk) blocks so per-sample
    projections are shared across directions.
    """
    n = x.shape[0]
    out = np.empty((thetas.shape[0], r_max))
    for lo in range(0, thetas.shape[0], chunk):
        block = x @ thetas[lo:lo + chunk].T
        h_prev = np.ones_like(block)
        h = block.copy()
        out[lo:lo + block.shape[1], 0] = h.mean(axis=0)
        for j in range(1, r_max):
            h, h_prev = block * h - j * h_prev, h
            out[lo:lo + block.shape[1], j] = h.mean(axis=0)
    return out


def _w1_scores(cand_pos, cand_w, ref_pos, ref_w):
    """1-d W1 between every candidate row and the reference, vectorized."""
    S, k = cand_pos.shape
    m = ref_pos.size
    pos = np.concatenate((cand_pos, np.broadcast_to(ref_pos, (S, m))), axis=1)
    sgn = np.concatenate((cand_w, np.broadcast_to(-ref_w, (S, m))), axis=1)
    order = np.argsort(pos, axis=1, kind="stable")
    pos = np.take_along_axis(pos, order, axis=1)
    cdf = np.cumsum(np.take_along_axis(sgn, order, axis=1), axis=1)
    return np.einsum("ij,ij->i", np.abs(cdf[:, :-1]), np.diff(pos, axis=1))


def estimate_low_dim(x, k: int, R: float, C1: float = 1.0, C2: float = 2.0,
                     tol: float = 1e-9) -> DiscreteDistribution:
    """Grid-search estimation of a k-atomic mixing distribution in few dimensions.

    Runs DMM on every coordinate, assembles candidates from the marginal
    supports and a simplex net sized by C1, fits DMM along every direction of
    a sphere net sized by C2, and returns the candidate minimizing the maximal
    projected W1 discrepancy. With one column (or k = 1) the search collapses
    to plain DMM, matching how the benchmark treats 2-component models.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("x must be an (n, r) array")
    n, r = x.shape
    if n < 1:
        raise ValueError("need at least one sample")

    if r == 1:
        return dmm_1d(x[:, 0], k, R, tol=tol)
    if k == 1:
        atom = np.array([dmm_1d(x[:, j], 1, R, tol=tol).atoms1d[0] for j in range(r)])
        return DiscreteDistribution(_clip_to_ball(atom, R)[None, :], [1.0])

    eps = grid_eps(n, k)
    marginals = [dmm_1d(x[:, j], k, R, tol=tol) for j in range(r)]
    supports = [g.atoms1d for g in marginals]
    weight_net = simplex_net(k, k * eps / (2.0 * C1))
    directions = sphere_net(r, min(2.0, 2.0 * math.pi * eps / C2))

    cand_pos, cand_w = _candidate_arrays(supports, weight_net, k)
    cand_pos = _clip_to_ball(cand_pos, R)

    ref_moments = _directional_moments(x, directions, 2 * k - 1)
    scores = np.zeros(cand_pos.shape[0])
    for t in range(directions.shape[0]):
        ref = dmm_from_moments(MomentVector(ref_moments[t]), k, R, tol=tol)
        proj = cand_pos @ directions[t]
        w1 = _w1_scores(proj, cand_w, ref.atoms1d, ref.weights)
        np.maximum(scores, w1, out=scores)
    best = int(np.argmin(scores))
    return DiscreteDistribution(cand_pos[best], cand_w[best])


def estimate(X, k: int, R: float, center: bool = True, split: bool = False,
             C1: float = 1.0, C2: float = 2.0, tol: float = 1e-9) -> DiscreteDistribution:
    """Full d-dimensional mixing-distribution estimate.

    Spectral reduction (to k-1 dimensions after centering, or k without),
    low-dimensional grid search, and lifting back; input of dimension at most
    k skips the reduction. Atoms of the result are clipped to the radius-R
    ball. Splitting fits the subspace on the first half of the sample and the
    low-dimensional distribution on the second (off by default, matching the
    benchmark protocol).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be an (n, d) array")
    n, d = X.shape

    if d <= k or d == 1:
        gamma = estimate_low_dim(X, k, R, C1=C1, C2=C2, tol=tol)
        return DiscreteDistribution(_clip_to_ball(gamma.atoms, R), gamma.weights,
                                    radius=R)

    first, second = (X[:n // 2], X[n // 2:]) if split else (X, X)

    if center:
        if k == 1:
            atom = _clip_to_ball(first.mean(axis=0), R)
            return DiscreteDistribution(atom[None, :], [1.0], radius=R)
        mean = first.mean(axis=0)
        V = top_subspace(covariance_shifted(first - mean), k - 1)
        # centered samples live in a ball of twice the radius
        gamma = estimate_low_dim((second - mean) @ V, k, 2.0 * R, C1=C1, C2=C2, tol=tol)
        lifted = lift_dist(gamma, V, mean)
    else:
        V = top_subspace(covariance_shifted(first), k)
        gamma = estimate_low_dim(second @ V, k, R, C1=C1, C2=C2, tol=tol)
        lifted = lift_dist(gamma, V)
    return DiscreteDistribution(_clip_to_ball(lifted.atoms, R), lifted.weights,
                                radius=R)
