"""One-dimensional moment machinery for the denoised method of moments.

The pipeline estimates Hermite-polynomial moments from noisy samples, projects
the estimate onto the moment space of distributions supported on [-R, R]
(characterized by a pair of positive semidefinite localizing Hankel matrices),
and recovers the unique atomic distribution matching the denoised moments by
Gauss quadrature.
"""

import numpy as np
from scipy.linalg import cholesky, solve_triangular


class MomentSpaceError(Exception):
    """Raised when projection or quadrature cannot produce a usable result.

    Carries ``residual``, the final numeric discrepancy, for diagnostics.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MomentVector:
    """First r moments (m_1, ..., m_r) of a distribution; m_0 = 1 is implicit.

    :param values: moment sequence, entry j-1 holding the j-th moment.
    :param radius: support bound R the vector is associated with, if known.
    """

    __slots__ = ("values", "radius")

    def __init__(self, values, radius=None):
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("moment vector must contain at least one moment")
        if not np.all(np.isfinite(values)):
            raise ValueError("moments must be finite")
        self.values = values
        self.radius = None if radius is None else float(radius)

    @property
    def order(self) -> int:
        return self.values.size

    def __repr__(self):
        return f"MomentVector({self.values.tolist()}, radius={self.radius})"


def hermite_eval(r: int, x):
    """Evaluate the degree-r Hermite polynomial H_r at x.

    Uses the three-term recurrence H_{r+1}(x) = x H_r(x) - r H_{r-1}(x) with
    H_0 = 1 and H_1 = x (the probabilists' normalization, so that H_r applied
    to a unit-noise observation is an unbiased estimate of the r-th moment of
    the mixing distribution). Accepts scalars or arrays.
    """
    if r < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if r == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for j in range(1, r):
        h, h_prev = x * h - j * h_prev, h
    return h if h.ndim else float(h)


def unbiased_moment_estimates(samples, r_max: int) -> MomentVector:
    """Average H_1, ..., H_{r_max} over the sample.

    For Y ~ nu * N(0,1), E[H_j(Y)] equals the j-th moment of nu, so each entry
    is the unique unbiased polynomial estimate of that moment.
    """
    y = np.asarray(samples, dtype=float).ravel()
    if y.size == 0:
        raise MomentSpaceError("cannot estimate moments from an empty sample")
    if r_max < 1:
        raise ValueError("r_max must be positive")
    out = np.empty(r_max)
    h_prev = np.ones_like(y)
    h = y.copy()
    out[0] = h.mean()
    for j in range(1, r_max):
        h, h_prev = y * h - j * h_prev, h
        out[j] = h.mean()
    return MomentVector(out)


def _hankel_pair(values, R):
    # s = (m_0, m_1, ..., m_{2k-1}) with m_0 = 1; H holds s[i+j], B holds s[i+j+1]
    s = np.concatenate(([1.0], values))
    k = s.size // 2
    idx = np.arange(k)
    H = s[idx[:, None] + idx[None, :]]
    B = s[idx[:, None] + idx[None, :] + 1]
    return R * H + B, R * H - B


def localizing_hankels(m: MomentVector, R: float):
    """Build the localizing Hankel pair (R*H + B, R*H - B) for support [-R, R].

    H is the Hankel matrix of (m_0, ..., m_{2k-2}) and B the shifted Hankel of
    (m_1, ..., m_{2k-1}). The vector lies in the moment space of [-R, R] if
    and only if both matrices are positive semidefinite.
    """
    if m.order % 2 == 0:
        raise ValueError("localizing Hankel matrices require odd order 2k-1")
    return _hankel_pair(m.values, R)


def is_valid(m: MomentVector, R: float, tol: float = 1e-9) -> bool:
    """Moment-space membership test: both localizing matrices PSD within tol."""
    P, Q = localizing_hankels(m, R)
    return (np.linalg.eigvalsh(P)[0] >= -tol) and (np.linalg.eigvalsh(Q)[0] >= -tol)


def _psd_part(M):
    lam, V = np.linalg.eigh(M)
    lam = np.clip(lam, 0.0, None)
    return (V * lam) @ V.T


def _adjoint(P, Q, R):
    # Adjoint of m -> (R*H(m)+B(m), R*H(m)-B(m)) applied to a matrix pair:
    # collects anti-diagonal sums with the R/+-1 structure coefficients.
    k = P.shape[0]
    out = np.zeros(2 * k - 1)
    hpart = P + Q          # picks up the R*H component twice
    bpart = P - Q          # picks up the B component twice
    for t in range(1, 2 * k):
        i = np.arange(max(0, t - k + 1), min(k, t + 1))
        out[t - 1] += R * hpart[i, t - i].sum()
        i = np.arange(max(0, t - 1 - k + 1), min(k, t))
        out[t - 1] += bpart[i, t - 1 - i].sum()
    return out


def _structure_weights(order, R):
    # Diagonal of the normal matrix sum(G+^T G+ + G-^T G-): anti-diagonal
    # counts of H (weighted R^2) and of B, each appearing twice.
    k = (order + 1) // 2
    counts = np.array([k - abs(t - (k - 1)) for t in range(2 * k - 1)], dtype=float)

    def c_h(t):
        return counts[t] if 0 <= t <= 2 * k - 2 else 0.0

    w = np.empty(order)
    for t in range(1, order + 1):
        w[t - 1] = 2.0 * (R * R * c_h(t) + c_h(t - 1))
    return w


def project_to_moment_space(m_tilde: MomentVector, R: float, tol: float = 1e-9,
                            max_sweeps: int = 10_000) -> MomentVector:
    """Euclidean projection of a moment vector onto the moment space of [-R, R].

    Alternates eigenvalue clipping of the localizing Hankel pair with
    re-averaging through the adjoint of the Hankel structure map, with dual
    corrections so the fixed point is the metric projection (an ADMM splitting
    of the projection problem; the moment space is the PSD-pair preimage).
    Stops once successive iterates move less than tol and the clipped pair is
    reproduced within tol.

    Raises MomentSpaceError (carrying the final residual) if the sweep budget
    is exhausted before reaching tolerance.
    """
    if m_tilde.order % 2 == 0:
        raise ValueError("projection requires odd order 2k-1")
    R = float(R)
    target = m_tilde.values.copy()
    scale = max(1.0, np.abs(target).max())

    P0, Q0 = _hankel_pair(target, R)
    lo = min(np.linalg.eigvalsh(P0)[0], np.linalg.eigvalsh(Q0)[0])
    if lo >= -1e-14 * max(1.0, R) * scale:
        return MomentVector(target, radius=R)

    order = m_tilde.order
    weights = _structure_weights(order, R)
    rho = 1.0 / max(1.0, R * R)
    diag = 1.0 + rho * weights
    alpha = 1.7  # over-relaxation; fixed point unchanged for alpha in (0, 2)

    m = target.copy()
    MP, MQ = _hankel_pair(m, R)
    MP, MQ = _psd_part(MP), _psd_part(MQ)
    UP = np.zeros_like(MP)
    UQ = np.zeros_like(MQ)

    resid = np.inf
    for sweep in range(max_sweeps):
        # re-averaging step: diagonal normal-equation solve through the adjoint
        AP = (MP - UP).copy()
        AQ = (MQ - UQ).copy()
        AP[0, 0] -= R  # remove the fixed m_0 contribution before the adjoint
        AQ[0, 0] -= R
        m_new = (target + rho * _adjoint(AP, AQ, R)) / diag
        move = np.abs(m_new - m).max()
        m = m_new

        P, Q = _hankel_pair(m, R)
        Ph = alpha * P + (1.0 - alpha) * MP
        Qh = alpha * Q + (1.0 - alpha) * MQ
        MP_old, MQ_old = MP, MQ
        MP = _psd_part(Ph + UP)
        MQ = _psd_part(Qh + UQ)
        UP += Ph - MP
        UQ += Qh - MQ
        resid = max(np.abs(P - MP).max(), np.abs(Q - MQ).max())
        if move < tol * scale and resid < tol * scale:
            return MomentVector(m, radius=R)
        if sweep % 25 == 24:
            # residual balancing keeps the penalty matched to the geometry
            dual = rho * max(np.abs(MP - MP_old).max(), np.abs(MQ - MQ_old).max())
            if resid > 10.0 * dual and rho < 1e6:
                rho *= 2.0
                UP *= 0.5
                UQ *= 0.5
                diag = 1.0 + rho * weights
            elif dual > 10.0 * resid and rho > 1e-6:
                rho *= 0.5
                UP *= 2.0
                UQ *= 2.0
                diag = 1.0 + rho * weights
    raise MomentSpaceError(
        f"moment-space projection did not converge in {max_sweeps} sweeps "
        f"(residual {resid:.3e})", residual=resid)


def gauss_quadrature(m: MomentVector, k: int, R: float,
                     rank_tol: float = 1e-10) -> "DiscreteDistribution":
    """Recover the atomic distribution on [-R, R] matching the moments m.

    Builds the Jacobi matrix from the Cholesky factor of the Hankel moment
    matrix and reads atoms and weights off its eigendecomposition (nodes are
    eigenvalues, weights squared first eigenvector components). A numerically
    rank-deficient Hankel matrix, detected below rank_tol times the leading
    eigenvalue, yields fewer than k atoms.

    Raises MomentSpaceError when the truncated-rank solution cannot reproduce
    the trailing input moments (inconsistent tail).
    """
    from .distributions import DiscreteDistribution

    if k < 1:
        raise ValueError("k must be positive")
    values = m.values
    if values.size < 2 * k - 1:
        raise ValueError(f"need {2 * k - 1} moments for k={k}, got {values.size}")
    values = values[:2 * k - 1]
    s = np.concatenate(([1.0], values))

    idx = np.arange(k)
    H = s[idx[:, None] + idx[None, :]]
    lam = np.linalg.eigvalsh(H)
    r = int(np.sum(lam > rank_tol * lam[-1]))
    r = max(r, 1)

    atoms = weights = None
    while r >= 1:
        idx = np.arange(r)
        Hr = s[idx[:, None] + idx[None, :]]
        Br = s[idx[:, None] + idx[None, :] + 1]
        try:
            L = cholesky(Hr, lower=True)
        except np.linalg.LinAlgError:
            r -= 1
            continue
        # Jacobi matrix J = L^-1 B L^-T, symmetric tridiagonal in exact arithmetic
        Y = solve_triangular(L, Br, lower=True)
        J = solve_triangular(L, Y.T, lower=True).T
        J = 0.5 * (J + J.T)
        nodes, vecs = np.linalg.eigh(J)
        atoms = nodes
        weights = vecs[0] ** 2
        break
    if atoms is None:
        raise MomentSpaceError("Hankel matrix is numerically indefinite",
                               residual=float(lam[0]))

    atoms, weights = _polish(atoms, weights, values[:2 * r - 1])
    atoms = np.clip(atoms, -R, R)
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()

    if r < k:
        got = _raw_moments(atoms, weights, 2 * k - 1)
        err = np.abs(got - values).max()
        if err > 1e-5 * max(1.0, abs(R)) ** (2 * k - 1):
            raise MomentSpaceError(
                f"rank-deficient Hankel ({r} atoms) inconsistent with trailing "
                f"moments (max deviation {err:.3e})", residual=err)
    return DiscreteDistribution(atoms.reshape(-1, 1), weights)


def _raw_moments(atoms, weights, r_max):
    powers = np.vander(atoms, r_max + 1, increasing=True)[:, 1:]
    return weights @ powers


def _polish(atoms, weights, target):
    """A few Newton steps on the square moment system to shed the conditioning
    error of the Cholesky/eigen route; falls back to the input on failure."""
    r = atoms.size
    if r == 1:
        return np.array([target[0]]), np.array([1.0])
    x = atoms.copy()
    w = weights.copy()
    scale = max(1.0, np.abs(target).max())
    best = (x, w, np.abs(_raw_moments(x, w, target.size) - target).max())
    for _ in range(8):
        res = _raw_moments(x, w, target.size) - target
        err = np.abs(res).max()
        if err < best[2]:
            best = (x.copy(), w.copy(), err)
        if err < 1e-15 * scale:
            break
        n_eq = target.size
        jac = np.zeros((n_eq, n_eq))
        for j in range(1, n_eq + 1):
            jac[j - 1, :r] = j * w * x ** (j - 1)
            # weights live on the simplex: w_r absorbs the remaining mass
            jac[j - 1, r:] = x[:-1] ** j - x[-1] ** j
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            break
        x = x - step[:r]
        dw = step[r:]
        w = w - np.concatenate((dw, [-dw.sum()]))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
            break
        if np.any(w < -1e-9):
            break
    x, w, _ = best
    return x, w


def dmm_from_moments(m: MomentVector, k: int, R: float,
                     tol: float = 1e-9) -> "DiscreteDistribution":
    """Denoise a raw moment estimate and recover the atomic distribution."""
    clean = project_to_moment_space(m, R, tol=tol)
    return gauss_quadrature(clean, k, R)


def dmm_1d(samples, k: int, R: float, tol: float = 1e-9) -> "DiscreteDistribution":
    """Denoised method of moments in one dimension.

    Composition of unbiased Hermite moment estimation, projection onto the
    moment space of [-R, R], and Gauss quadrature. Deterministic given the
    sample.
    """
    m = unbiased_moment_estimates(samples, 2 * k - 1)
    return dmm_from_moments(m, k, R, tol=tol)
