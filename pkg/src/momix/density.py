"""Proper density estimation for Gaussian location mixtures.

Both estimators return genuine members of the model class (a mixing
distribution wrapped as a GaussianMixture), never an improper score. The
2-component estimator needs only a top eigenvector and one univariate DMM
fit; the general k estimator grid-searches moment matches over projected
candidates and is exponential in k, so it guards its work with an explicit
budget.
"""

import itertools
import math

import numpy as np

from .distributions import DiscreteDistribution, GaussianMixture
from .mixing import _clip_to_ball, _w1_scores  # noqa: F401  (shared internals)
from .moments import dmm_1d
from .nets import ball_net, simplex_net, sphere_net
from .spectral import covariance_shifted, top_subspace


class BudgetError(Exception):
    """Raised when the candidate grid exceeds the configured work budget."""

    def __init__(self, required: int, budget: int):
        self.required = int(required)
        self.budget = int(budget)
        super().__init__(f"grid search needs {self.required} candidate-direction "
                         f"evaluations, over the budget of {self.budget}; raise the "
                         f"budget or lower grid_scale")


def log_density(P: GaussianMixture, x) -> np.ndarray:
    """Log density of the mixture at each row of x, by log-sum-exp."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    mu = P.mixing.atoms
    if x.shape[1] != mu.shape[1]:
        raise ValueError("dimension mismatch")
    # ||x - mu||^2 expanded; the x^2 term is shared across components
    sq = (np.sum(x * x, axis=1)[:, None] - 2.0 * x @ mu.T
          + np.sum(mu * mu, axis=1)[None, :])
    logits = np.log(P.mixing.weights)[None, :] - 0.5 * sq
    m = logits.max(axis=1)
    out = m + np.log(np.sum(np.exp(logits - m[:, None]), axis=1))
    return out - 0.5 * x.shape[1] * math.log(2.0 * math.pi)


def evaluate_density(P: GaussianMixture, x) -> float:
    """Density of the mixture at a single point."""
    return float(np.exp(log_density(P, np.asarray(x, dtype=float)[None, :]))[0])


def density_estimate_2gm(X, R: float, split: bool = True) -> GaussianMixture:
    """Proper 2-component density estimate along the top principal direction.

    Estimates the mean and the shifted covariance, projects onto the top
    eigenvector, fits a 2-atomic distribution by DMM, and lifts the atoms
    back to theta_i * u + mean. With split=True (the analyzed variant) the
    direction comes from the first half of the sample and the projection
    uses the second; split=False reuses the whole sample for both.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be an (n, d) array")
    n = X.shape[0]
    first, second = (X[:n // 2], X[n // 2:]) if split else (X, X)
    mean = first.mean(axis=0)
    u = top_subspace(covariance_shifted(first - mean), 1)[:, 0]
    # projected centered atoms sit within twice the radius
    gamma1 = dmm_1d((second - mean) @ u, 2, 2.0 * R)
    atoms = _clip_to_ball(gamma1.atoms1d[:, None] * u[None, :] + mean, R)
    return GaussianMixture(DiscreteDistribution(atoms, gamma1.weights, radius=R))


def density_estimate_kgm(X, k: int, R: float, grid_scale: float = 1.0,
                         budget: int = 5_000_000, C2: float = 2.0) -> GaussianMixture:
    """Proper k-component density estimate by moment matching over a grid.

    Reduces to k dimensions, lays an eps-grid over atoms (ball net), weights
    (simplex net) and directions (sphere net) with eps = grid_scale / sqrt(n),
    and picks the candidate whose projected moments up to order 2k-1 best
    match per-direction DMM fits in the worst case. The candidate count grows
    like (1/eps)^{O(k)}; when candidates times directions would exceed
    `budget`, a BudgetError carrying the required budget is raised instead of
    starting the search.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be an (n, d) array")
    n, d = X.shape
    if k < 1:
        raise ValueError("k must be >= 1")

    r = min(d, k)
    if d > r:
        V = top_subspace(covariance_shifted(X), r)
        Z = X @ V
    else:
        V = np.eye(d)
        Z = X

    eps = grid_scale / math.sqrt(n)

    if r == 1:
        gamma1 = dmm_1d(Z[:, 0], k, R)
        atoms = gamma1.atoms1d[:, None] * V[:, 0][None, :] if d > 1 else gamma1.atoms
        return GaussianMixture(DiscreteDistribution(_clip_to_ball(atoms, R),
                                                    gamma1.weights, radius=R))

    atom_net = ball_net(r, eps, R)
    weight_net = simplex_net(k, eps)
    directions = sphere_net(r, min(2.0, 2.0 * math.pi * eps / C2))

    n_subsets = math.comb(atom_net.shape[0], k) if atom_net.shape[0] >= k \
        else math.comb(atom_net.shape[0] + k - 1, k)
    required = n_subsets * weight_net.shape[0] * directions.shape[0]
    if required > budget:
        raise BudgetError(required, budget)

    if atom_net.shape[0] >= k:
        subsets = np.array(list(itertools.combinations(range(atom_net.shape[0]), k)))
    else:
        subsets = np.array(list(itertools.combinations_with_replacement(
            range(atom_net.shape[0]), k)))
    n_w = weight_net.shape[0]
    cand_pos = np.repeat(atom_net[subsets], n_w, axis=0)       # (S, k, r)
    cand_w = np.tile(weight_net, (subsets.shape[0], 1))        # (S, k)

    r_max = 2 * k - 1
    scores = np.zeros(cand_pos.shape[0])
    for t in range(directions.shape[0]):
        ref = dmm_1d(Z @ directions[t], k, R)
        ref_m = np.asarray([np.sum(ref.weights * ref.atoms1d ** (j + 1))
                            for j in range(r_max)])
        proj = cand_pos @ directions[t]                        # (S, k)
        pw = proj[:, :, None] ** np.arange(1, r_max + 1)[None, None, :]
        cand_m = np.einsum("sk,skr->sr", cand_w, pw)
        np.maximum(scores, np.max(np.abs(cand_m - ref_m[None, :]), axis=1), out=scores)
    best = int(np.argmin(scores))

    atoms = cand_pos[best] @ V.T if d > r else cand_pos[best]
    return GaussianMixture(DiscreteDistribution(_clip_to_ball(atoms, R),
                                                cand_w[best], radius=R))
