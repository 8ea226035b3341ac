"""EM baseline for k-component location mixtures with identity covariance."""

import logging

import numpy as np

from .distributions import DiscreteDistribution, GaussianMixture
from .density import log_density
from .rng import stream

logger = logging.getLogger(__name__)

MAX_ITER = 1000
REL_TOL = 1e-6
EMPTY_WEIGHT = 1e-12


def log_likelihood(X, gamma: DiscreteDistribution) -> float:
    """Total log likelihood of the sample under the location mixture."""
    return float(np.sum(log_density(GaussianMixture(gamma), X)))


def em_fit(X, k: int, seed: int, max_iter: int = MAX_ITER, rel_tol: float = REL_TOL,
           return_history: bool = False):
    """Maximum-likelihood fit by EM, unit covariance, weights and means free.

    Initialization draws k distinct sample points as centers with uniform
    weights from a seeded generator. Stops after `max_iter` sweeps or when
    the relative log-likelihood improvement drops below `rel_tol`. A
    component whose weight collapses below 1e-12 is re-seeded at a random
    sample point (and the event logged). With return_history=True the
    per-iteration log-likelihood trace comes back alongside the fit.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be an (n, d) array")
    n, d = X.shape
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")

    rng = stream(seed, "em-init")
    centers = X[rng.choice(n, size=k, replace=False)].copy()
    weights = np.full(k, 1.0 / k)

    xsq = np.sum(X * X, axis=1)
    history = []
    prev = -np.inf
    for it in range(max_iter):
        sq = xsq[:, None] - 2.0 * X @ centers.T + np.sum(centers * centers, axis=1)[None, :]
        logits = np.log(weights)[None, :] - 0.5 * sq
        m = logits.max(axis=1)
        lse = m + np.log(np.sum(np.exp(logits - m[:, None]), axis=1))
        ll = float(np.sum(lse)) - 0.5 * n * d * np.log(2.0 * np.pi)
        history.append(ll)
        if np.isfinite(prev) and abs(ll - prev) <= rel_tol * abs(prev):
            break
        prev = ll

        resp = np.exp(logits - lse[:, None])
        nk = resp.sum(axis=0)
        dead = nk / n < EMPTY_WEIGHT
        if np.any(dead):
            for j in np.flatnonzero(dead):
                centers[j] = X[rng.integers(n)]
                nk[j] = 1.0
                logger.warning("EM component %d collapsed at iteration %d; "
                               "re-seeded from a sample point", j, it)
            nk = nk * (n / nk.sum())
            alive = ~dead
            centers[alive] = (resp[:, alive].T @ X) / nk[alive, None]
        else:
            centers = (resp.T @ X) / nk[:, None]
        weights = nk / nk.sum()

    fit = DiscreteDistribution(centers, weights)
    if return_history:
        return fit, history
    return fit
