"""PCA dimension reduction for mixture estimation.

The noise covariance of a unit-variance Gaussian mixture is the identity, so
the shifted sample covariance (1/n) sum x x^T - I estimates the second-moment
matrix of the mixing distribution; its top eigenvectors span the atoms.
"""

import numpy as np

from .distributions import DiscreteDistribution


def covariance_shifted(X):
    """(1/n) sum_i x_i x_i^T - I, symmetrized exactly."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("X must be a nonempty (n, d) array")
    n, d = X.shape
    S = (X.T @ X) / n
    S = 0.5 * (S + S.T)
    S[np.diag_indices(d)] -= 1.0
    return S


def top_subspace(M, r: int):
    """Orthonormal basis (d x r) for the top-r eigenspace of a symmetric M.

    Deterministic output: eigenvalues sorted descending (stable), and each
    eigenvector's first entry exceeding 1e-12 of its largest magnitude is made
    positive. Exact eigenvalue ties are ordered lexicographically by vector.
    """
    M = np.asarray(M, dtype=float)
    d = M.shape[0]
    if not 1 <= r <= d:
        raise ValueError(f"need 1 <= r <= {d}, got {r}")
    lam, V = np.linalg.eigh(M)
    lam, V = lam[::-1], V[:, ::-1]
    for j in range(d):
        col = V[:, j]
        i = np.argmax(np.abs(col) > 1e-12 * np.abs(col).max())
        if col[i] < 0:
            V[:, j] = -col
    # stable order under exact ties: eigenvalue desc, then vector lexicographic
    order = sorted(range(d), key=lambda j: (-lam[j], tuple(V[:, j])))
    return V[:, order[:r]]


def reduce(X, V):
    """Project samples onto the subspace: rows V^T x_i."""
    X = np.asarray(X, dtype=float)
    V = np.asarray(V, dtype=float)
    if X.shape[1] != V.shape[0]:
        raise ValueError(f"cannot project dim {X.shape[1]} onto basis of dim {V.shape[0]}")
    return X @ V


def lift_dist(gamma: DiscreteDistribution, V, shift=None) -> DiscreteDistribution:
    """Map a low-dimensional atomic distribution back: atoms V psi + shift."""
    V = np.asarray(V, dtype=float)
    if gamma.dim != V.shape[1]:
        raise ValueError(f"basis has {V.shape[1]} columns, atoms have dim {gamma.dim}")
    atoms = gamma.atoms @ V.T
    if shift is not None:
        atoms = atoms + np.asarray(shift, dtype=float)
    return DiscreteDistribution(atoms, gamma.weights)


def center_then_reduce(X, r: int):
    """Center the sample, then project onto the top-r shifted-covariance subspace.

    Returns (reduced samples, basis V, sample mean) so that lift_dist can add
    the mean back after low-dimensional estimation.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] < 2:
        raise ValueError("need at least two samples to center")
    mean = X.mean(axis=0)
    Xc = X - mean
    V = top_subspace(covariance_shifted(Xc), r)
    return Xc @ V, V, mean
