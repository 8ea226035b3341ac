"""Atomic distributions, Gaussian mixtures, sampling, and Wasserstein distances."""

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .rng import stream

MERGE_TOL = 1e-12


class DiscreteDistribution:
    """A distribution with at most k atoms in d dimensions.

    Atoms closer than 1e-12 are merged with summed weights and the support is
    kept in lexicographic order, so equal measures have equal representations.

    :param atoms: (k, d) array of atom locations; a flat length-k array is
        read as k one-dimensional atoms.
    :param weights: k nonnegative weights summing to one (within 1e-12).
    :param radius: optional declared support radius R; atom norms are checked
        against it at construction.
    """

    __slots__ = ("atoms", "weights", "radius")

    def __init__(self, atoms, weights, radius=None):
        atoms = np.asarray(atoms, dtype=float)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        if atoms.ndim != 2:
            raise ValueError("atoms must be a (k, d) array")
        weights = np.asarray(weights, dtype=float).ravel()
        if weights.size != atoms.shape[0]:
            raise ValueError("one weight per atom required")
        if np.any(weights < -1e-12):
            raise ValueError("weights must be nonnegative")
        total = weights.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {total}, not 1")
        weights = np.clip(weights, 0.0, None) / np.clip(weights, 0.0, None).sum()

        keep = weights > 0.0
        if not np.all(keep) and np.any(keep):
            atoms, weights = atoms[keep], weights[keep]

        order = np.lexsort(atoms.T[::-1])
        atoms, weights = atoms[order], weights[order]
        atoms, weights = _merge_close(atoms, weights)

        if radius is not None:
            norms = np.linalg.norm(atoms, axis=1)
            if norms.size and norms.max() > radius * (1 + 1e-6) + 1e-12:
                raise ValueError(
                    f"atom norm {norms.max():.6g} exceeds declared radius {radius}")
        self.atoms = atoms
        self.weights = weights
        self.radius = None if radius is None else float(radius)

    @property
    def k(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def atoms1d(self):
        """Flat atom locations; only meaningful in one dimension."""
        if self.dim != 1:
            raise ValueError("atoms1d requires a one-dimensional distribution")
        return self.atoms[:, 0]

    def mean(self):
        return self.weights @ self.atoms

    def __repr__(self):
        return (f"DiscreteDistribution(k={self.k}, dim={self.dim}, "
                f"atoms={self.atoms.tolist()}, weights={self.weights.tolist()})")


def _merge_close(atoms, weights):
    if atoms.shape[0] <= 1:
        return atoms, weights
    out_a = [atoms[0]]
    out_w = [weights[0]]
    for a, w in zip(atoms[1:], weights[1:]):
        if np.abs(a - out_a[-1]).max() <= MERGE_TOL:
            out_w[-1] += w
        else:
            out_a.append(a)
            out_w.append(w)
    return np.array(out_a), np.array(out_w)


class GaussianMixture:
    """A mixing distribution convolved with unit-variance isotropic noise."""

    __slots__ = ("mixing",)

    def __init__(self, mixing: DiscreteDistribution):
        self.mixing = mixing

    @property
    def dim(self) -> int:
        return self.mixing.dim

    def __repr__(self):
        return f"GaussianMixture({self.mixing!r})"


def project_dist(gamma: DiscreteDistribution, theta) -> DiscreteDistribution:
    """Pushforward of gamma onto the direction theta (a unit vector)."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != gamma.dim:
        raise ValueError(f"direction has dim {theta.size}, atoms have {gamma.dim}")
    if abs(np.linalg.norm(theta) - 1.0) > 1e-10:
        raise ValueError("theta must be a unit vector")
    return DiscreteDistribution(gamma.atoms @ theta, gamma.weights)


def w1_1d(gamma: DiscreteDistribution, gamma2: DiscreteDistribution) -> float:
    """Exact 1-d Wasserstein-1 distance, the L1 norm of the CDF difference."""
    if gamma.dim != 1 or gamma2.dim != 1:
        raise ValueError("w1_1d requires one-dimensional distributions")
    pos = np.concatenate((gamma.atoms1d, gamma2.atoms1d))
    sgn = np.concatenate((gamma.weights, -gamma2.weights))
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    cdf = np.cumsum(sgn[order])
    return float(np.abs(cdf[:-1]) @ np.diff(pos))


def transport_cost(gamma: DiscreteDistribution, gamma2: DiscreteDistribution,
                   squared: bool = False) -> float:
    """Optimal transport cost between atomic distributions.

    Solves the k x k' transportation linear program exactly with Euclidean
    (or squared Euclidean) ground cost.
    """
    if gamma.dim != gamma2.dim:
        raise ValueError("dimension mismatch")
    a, b = gamma.atoms, gamma2.atoms
    diff = a[:, None, :] - b[None, :, :]
    cost = np.sqrt(np.maximum(np.einsum("ijd,ijd->ij", diff, diff), 0.0))
    if squared:
        cost = cost ** 2
    ka, kb = gamma.k, gamma2.k
    if ka == 1 or kb == 1:
        # a point mass on either side fixes the coupling
        return float(gamma.weights @ cost @ gamma2.weights)

    # transportation polytope: row sums = weights, column sums = weights2
    rows = []
    for i in range(ka):
        ind = np.zeros((ka, kb))
        ind[i] = 1.0
        rows.append(ind.ravel())
    for j in range(kb - 1):  # last column constraint is redundant
        ind = np.zeros((ka, kb))
        ind[:, j] = 1.0
        rows.append(ind.ravel())
    A_eq = sp.csr_matrix(np.array(rows))
    b_eq = np.concatenate((gamma.weights, gamma2.weights[:-1]))
    res = linprog(cost.ravel(), A_eq=A_eq, b_eq=b_eq, bounds=(0, None),
                  method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


def w1_exact(gamma: DiscreteDistribution, gamma2: DiscreteDistribution) -> float:
    """Exact multivariate Wasserstein-1 distance."""
    return transport_cost(gamma, gamma2, squared=False)


def w2_exact(gamma: DiscreteDistribution, gamma2: DiscreteDistribution) -> float:
    """Exact Wasserstein-2 distance (square root of the squared-cost optimum)."""
    return float(np.sqrt(max(transport_cost(gamma, gamma2, squared=True), 0.0)))


def sliced_w1(gamma: DiscreteDistribution, gamma2: DiscreteDistribution,
              net) -> float:
    """Max of 1-d W1 distances over the projection directions in net.

    A lower bound on the sliced Wasserstein distance, itself a lower bound on
    the full W1 distance.
    """
    net = np.atleast_2d(np.asarray(net, dtype=float))
    if net.shape[0] == 0:
        raise ValueError("direction net must be nonempty")
    if (np.array_equal(gamma.atoms, gamma2.atoms)
            and np.array_equal(gamma.weights, gamma2.weights)):
        return 0.0
    # all directions at once: signed CDF of the merged projected supports
    pos = np.concatenate((gamma.atoms @ net.T, gamma2.atoms @ net.T), axis=0).T
    sgn = np.concatenate((gamma.weights, -gamma2.weights))
    best = 0.0
    for lo in range(0, pos.shape[0], 65536):
        block = pos[lo:lo + 65536]
        order = np.argsort(block, axis=1, kind="stable")
        p = np.take_along_axis(block, order, axis=1)
        cdf = np.cumsum(sgn[order], axis=1)
        vals = np.einsum("ij,ij->i", np.abs(cdf[:, :-1]), np.diff(p, axis=1))
        best = max(best, float(vals.max()))
    return best


def sample(P: GaussianMixture, n: int, seed: int):
    """Draw n i.i.d. observations from the mixture, reproducibly per seed."""
    if n < 1:
        raise ValueError("n must be positive")
    gen = stream(seed)
    mixing = P.mixing
    idx = gen.choice(mixing.k, size=n, p=mixing.weights)
    return mixing.atoms[idx] + gen.standard_normal((n, mixing.dim))


def moments_1d(gamma: DiscreteDistribution, r_max: int) -> "MomentVector":
    """Exact raw moments sum_j w_j a_j^r for r = 1..r_max."""
    from .moments import MomentVector

    if gamma.dim != 1:
        raise ValueError("moments_1d requires a one-dimensional distribution")
    powers = np.vander(gamma.atoms1d, r_max + 1, increasing=True)[:, 1:]
    return MomentVector(gamma.weights @ powers)
