"""Moment tensors of mixing distributions and distances built from them.

A k-atomic distribution keeps its order-l moment tensor sum_j w_j mu_j^{(x l)}
in factored form, so Frobenius inner products reduce to the k x k Gram matrix
of the atoms raised elementwise to the l-th power. Dense materialization is
available for small tensors only.
"""

from dataclasses import dataclass
from functools import reduce as _reduce

import numpy as np

from .distributions import DiscreteDistribution, GaussianMixture, sample
from .rng import derive_seed, stream

DENSE_LIMIT = 1_000_000


@dataclass(frozen=True)
class MomentTensor:
    """Symmetric tensor sum_j coeffs[j] * points[j]^{(x order)} in factored form."""

    order: int
    points: np.ndarray   # (k, d)
    coeffs: np.ndarray   # (k,), signed

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        coef = np.asarray(self.coeffs, dtype=float).ravel()
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if pts.shape[0] != coef.size:
            raise ValueError("one coefficient per point required")
        pts, coef = _merge_equal_points(pts, coef)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "coeffs", coef)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def dense(self) -> np.ndarray:
        """Materialize the full d^order array. Guarded against blowup."""
        d = self.dim
        if d ** self.order > DENSE_LIMIT:
            raise ValueError(f"dense tensor would hold {d ** self.order} entries "
                             f"(limit {DENSE_LIMIT})")
        out = np.zeros((d,) * self.order)
        for c, p in zip(self.coeffs, self.points):
            out += c * _reduce(np.multiply.outer, [p] * self.order)
        return out

    def apply(self, u) -> float:
        """Full contraction <T, u^{(x order)}>."""
        return float(self.coeffs @ (self.points @ np.asarray(u, dtype=float)) ** self.order)

    def frob_norm(self) -> float:
        g = self.points @ self.points.T
        return _psd_form_norm(g ** self.order, self.coeffs)


def _merge_equal_points(pts, coef):
    """Sum coefficients of bitwise-identical rows and drop exact zeros.

    This makes the factored form of `T - T` the empty (zero) tensor instead
    of a cancellation-noise artifact; nothing is done about rows that are
    merely close.
    """
    if pts.shape[0] == 0:
        return pts, coef
    order = np.lexsort(pts.T[::-1])
    pts, coef = pts[order], coef[order]
    keep_pts, keep_coef = [], []
    for p, c in zip(pts, coef):
        if keep_pts and np.array_equal(keep_pts[-1], p):
            keep_coef[-1] += c
        else:
            keep_pts.append(p)
            keep_coef.append(c)
    coef = np.array(keep_coef)
    pts = np.array(keep_pts)
    live = coef != 0.0
    return pts[live].reshape(-1, pts.shape[1]), coef[live]


def _psd_form_norm(gram, coeffs) -> float:
    """sqrt(c' G c) for PSD G, via the square root of G.

    Writing the form as ||G^{1/2} c|| keeps cancellation error linear in
    machine epsilon; the direct quadratic form loses half the digits when
    c is a near-perfect cancellation (e.g. the difference of two copies of
    the same distribution).
    """
    vals, vecs = np.linalg.eigh(0.5 * (gram + gram.T))
    y = (vecs * np.sqrt(np.clip(vals, 0.0, None))).T @ coeffs
    return float(np.linalg.norm(y))


def moment_tensor(gamma: DiscreteDistribution, order: int) -> MomentTensor:
    return MomentTensor(order, gamma.atoms, gamma.weights)


def moment_tensor_diff(gamma: DiscreteDistribution, gamma2: DiscreteDistribution,
                       order: int) -> MomentTensor:
    """The signed tensor M_order(gamma) - M_order(gamma2)."""
    pts = np.vstack((gamma.atoms, gamma2.atoms))
    coef = np.concatenate((gamma.weights, -gamma2.weights))
    return MomentTensor(order, pts, coef)


def frob_dist_max(gamma: DiscreteDistribution, gamma2: DiscreteDistribution,
                  max_order: int) -> float:
    """max over l = 1..max_order of ||M_l(gamma) - M_l(gamma2)||_F.

    Every norm comes from Gram matrices of the stacked atoms, never from
    dense tensors, so the cost is k^2 * max_order regardless of dimension.
    """
    if gamma.dim != gamma2.dim:
        raise ValueError("dimension mismatch")
    pts, coef = _merge_equal_points(np.vstack((gamma.atoms, gamma2.atoms)),
                                    np.concatenate((gamma.weights, -gamma2.weights)))
    if coef.size == 0:
        return 0.0
    g = pts @ pts.T
    best = 0.0
    gl = np.ones_like(g)
    for _ in range(max_order):
        gl = gl * g
        best = max(best, _psd_form_norm(gl, coef))
    return best


def operator_norm(T: MomentTensor, restarts: int = 8, iters: int = 200,
                  seed: int = 0) -> float:
    """Injective tensor norm max_{|u|=1} |<T, u^{(x order)}>|, from below.

    Projected gradient ascent on +/- the contraction, started from every
    factor direction, from the top eigenvector of the mode-1 flattening
    Gram, and from seeded random unit vectors. Only function values at unit
    vectors are reported, so the result is a certified lower bound (exact in
    practice for the small tensors the diagnostics use).
    """
    d = T.dim
    ell = T.order
    if np.all(T.coeffs == 0.0):
        return 0.0

    starts = []
    for p in T.points:
        nrm = np.linalg.norm(p)
        if nrm > 1e-12:
            starts.append(p / nrm)
    # top eigenvector of T_(1) T_(1)^T, assembled from the factored form
    g = T.points @ T.points.T
    flat = (T.points.T * T.coeffs) @ (g ** (ell - 1)) @ T.points
    flat = 0.5 * (flat + flat.T)
    vals, vecs = np.linalg.eigh(flat)
    starts.append(vecs[:, int(np.argmax(np.abs(vals)))])
    rng = stream(seed, "tensor-op-norm")
    for _ in range(restarts):
        v = rng.standard_normal(d)
        starts.append(v / np.linalg.norm(v))

    scale = float(np.abs(T.coeffs) @ np.linalg.norm(T.points, axis=1) ** ell) + 1e-300
    best = 0.0
    for u0 in starts:
        for sign in (1.0, -1.0):
            u = u0.copy()
            val = sign * T.apply(u)
            step = 1.0 / (ell * scale)
            for _ in range(iters):
                grad = sign * ell * ((T.coeffs * (T.points @ u) ** (ell - 1)) @ T.points)
                moved = False
                while step > 1e-18:
                    cand = u + step * grad
                    nrm = np.linalg.norm(cand)
                    if nrm < 1e-300:
                        break
                    cand /= nrm
                    cval = sign * T.apply(cand)
                    if cval > val:
                        u, val = cand, cval
                        step *= 2.0
                        moved = True
                        break
                    step *= 0.5
                if not moved:
                    break
            best = max(best, val)
    return best


def hellinger_mc(P: GaussianMixture, Q: GaussianMixture, n_mc: int = 100_000,
                 seed: int = 0):
    """Monte Carlo squared Hellinger distance between two Gaussian mixtures.

    Importance-samples from the balanced mixture (P + Q) / 2, which keeps the
    integrand (sqrt(p) - sqrt(q))^2 / m bounded by 2 and the estimator finite
    even when the mixtures barely overlap. Returns (estimate, standard_error);
    the estimate is clipped to [0, 2].
    """
    if n_mc < 1000:
        raise ValueError("n_mc below 1000 gives meaningless error bars")
    half = n_mc // 2
    x = np.vstack((sample(P, half, derive_seed(seed, "hell-p")),
                   sample(Q, n_mc - half, derive_seed(seed, "hell-q"))))
    lp = _log_density(P, x)
    lq = _log_density(Q, x)
    lm = np.logaddexp(lp, lq) - np.log(2.0)
    vals = (np.exp(0.5 * (lp - lm)) - np.exp(0.5 * (lq - lm))) ** 2
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / np.sqrt(n_mc))
    return min(max(est, 0.0), 2.0), se


def _log_density(P: GaussianMixture, x) -> np.ndarray:
    from .density import log_density
    return log_density(P, x)


@dataclass(frozen=True)
class MomentHellingerReport:
    """Joint moment-tensor / Hellinger diagnostic for two mixing distributions."""

    frob_max: float
    hellinger_sq: float
    hellinger_se: float
    identified: bool

    @property
    def hellinger(self) -> float:
        return float(np.sqrt(self.hellinger_sq))


def moment_hellinger_report(gamma: DiscreteDistribution, gamma2: DiscreteDistribution,
                            k: int, n_mc: int = 100_000, seed: int = 0) -> MomentHellingerReport:
    """Compare two k-atomic mixing distributions via moments and densities.

    frob_max covers orders 1..2k-1, the range that determines k-atomic
    distributions; `identified` reports whether the moment distance and the
    Monte Carlo Hellinger distance agree on equality at the Monte Carlo noise
    level (both near zero, or both clearly positive).
    """
    fm = frob_dist_max(gamma, gamma2, 2 * k - 1)
    h2, se = hellinger_mc(GaussianMixture(gamma), GaussianMixture(gamma2),
                          n_mc=n_mc, seed=seed)
    thresh = max(4.0 * se, 1e-8)
    identified = (fm <= 1e-8) == (h2 <= thresh)
    return MomentHellingerReport(fm, h2, se, identified)
