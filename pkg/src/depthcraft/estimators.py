"""Location/scatter estimation: moment estimates, a simplified MCD, inverse roots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .datamodel import DataMatrix
from .errors import DegenerateDataError, ParameterError

__all__ = [
    "ScatterEstimate",
    "moment_estimate",
    "mcd_estimate",
    "inv_sqrt",
    "identity_estimate",
    "chi2_median",
    "scatter_estimate",
]

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ScatterEstimate:
    """Location vector plus scatter matrix with its precomputed inverses.

    ``kind`` records how the estimate was obtained: ``moment``, ``mcd``, or
    ``none`` (identity scatter, zero location).
    """

    mu: np.ndarray
    sigma: np.ndarray
    sigma_inv: np.ndarray
    sigma_inv_sqrt: np.ndarray
    kind: str

    @property
    def d(self) -> int:
        return self.mu.shape[0]


def _as_values(data) -> np.ndarray:
    if isinstance(data, DataMatrix):
        return data.values
    return np.asarray(data, dtype=float)


def inv_sqrt(sigma) -> np.ndarray:
    """Symmetric inverse square root of a symmetric positive definite matrix.

    Computed from the eigendecomposition ``U diag(lam) U'`` as
    ``U diag(lam**-0.5) U'``. Raises when the smallest eigenvalue falls at or
    below ``1e-12`` times the largest.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ParameterError(f"`sigma` must be square, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, atol=1e-10 * max(1.0, np.abs(sigma).max())):
        raise ParameterError("`sigma` must be symmetric")
    lam, vec = np.linalg.eigh(sigma)
    if lam[0] <= 1e-12 * lam[-1] or lam[-1] <= 0:
        raise DegenerateDataError(
            f"matrix is numerically singular (eigenvalue ratio {lam[0] / lam[-1]:.3e})"
        )
    return (vec * lam ** -0.5) @ vec.T


def _finish(mu: np.ndarray, sigma: np.ndarray, kind: str) -> ScatterEstimate:
    d = mu.shape[0]
    cond = np.linalg.cond(sigma)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        rank = np.linalg.matrix_rank(sigma, tol=1e-10 * max(1.0, np.abs(sigma).max()))
        raise DegenerateDataError(
            f"scatter matrix is numerically singular (rank {rank} of {d})"
        )
    sigma_inv = np.linalg.inv(sigma)
    sigma_inv = 0.5 * (sigma_inv + sigma_inv.T)
    return ScatterEstimate(
        mu=mu, sigma=sigma, sigma_inv=sigma_inv, sigma_inv_sqrt=inv_sqrt(sigma), kind=kind
    )


def identity_estimate(d: int) -> ScatterEstimate:
    """The ``kind='none'`` estimate: zero location, identity scatter."""
    eye = np.eye(d)
    return ScatterEstimate(mu=np.zeros(d), sigma=eye, sigma_inv=eye.copy(),
                           sigma_inv_sqrt=eye.copy(), kind="none")


def moment_estimate(data) -> ScatterEstimate:
    """Column means and the unbiased (divisor ``n - 1``) covariance."""
    x = _as_values(data)
    n, d = x.shape
    if n < 2:
        raise ParameterError(f"moment estimate needs n >= 2 rows, got {n}")
    mu = x.mean(axis=0)
    sigma = np.cov(x, rowvar=False, ddof=1).reshape(d, d)
    return _finish(mu, sigma, "moment")


def chi2_median(d: int) -> float:
    """Median of the chi-square distribution with ``d`` degrees of freedom.

    Found by bisection on the regularized lower incomplete gamma function;
    accurate to about 1e-12 relative.
    """
    if d < 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got {d}")
    lo, hi = 0.0, float(d) + 10.0 * np.sqrt(2.0 * d) + 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gammainc(d / 2.0, mid / 2.0) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _c_steps(x: np.ndarray, subset: np.ndarray, h: int, max_iter: int = 100):
    """Iterate C-steps from ``subset`` until the determinant stabilizes.

    Returns ``(subset, determinant, trace)`` where ``trace`` is the sequence
    of determinants across iterations (non-increasing by construction).
    """
    trace = []
    prev = np.inf
    for _ in range(max_iter):
        mu = x[subset].mean(axis=0)
        sigma = np.cov(x[subset], rowvar=False, ddof=1)
        det = float(np.linalg.det(sigma))
        if det <= 0 or not np.isfinite(det):
            return subset, np.inf, trace
        trace.append(det)
        try:
            inv = np.linalg.inv(sigma)
        except np.linalg.LinAlgError:
            return subset, np.inf, trace
        dx = x - mu
        d2 = np.einsum("ij,jk,ik->i", dx, inv, dx)
        subset = np.sort(np.argpartition(d2, h - 1)[:h])
        if abs(prev - det) < 1e-12:
            break
        prev = det
    return subset, trace[-1] if trace else np.inf, trace


def mcd_estimate(data, fraction: float = 0.75, rng=None, n_starts: int = 500,
                 _collect_traces: list | None = None) -> ScatterEstimate:
    """Simplified minimum covariance determinant estimate.

    Runs ``n_starts`` random elemental starts of ``d + 1`` points, iterates
    C-steps (keep the ``h`` smallest Mahalanobis distances, re-estimate) until
    the determinant changes by less than 1e-12 or 100 iterations, and keeps
    the subset with the smallest covariance determinant. The scatter is
    rescaled by ``median(d^2) / chi2_median(d)`` for consistency at the normal
    model. ``fraction = 1`` keeps every point and reduces to the moment
    estimate (no rescaling).
    """
    x = _as_values(data)
    n, d = x.shape
    if not 0.5 < fraction <= 1.0:
        raise ParameterError(f"`fraction` must lie in (0.5, 1], got {fraction}")
    h = int(np.ceil(fraction * n))
    if h < d + 1:
        raise ParameterError(
            f"subset size h={h} is below d+1={d + 1}; raise `fraction` or add data"
        )
    if h >= n:
        est = moment_estimate(x)
        return ScatterEstimate(est.mu, est.sigma, est.sigma_inv, est.sigma_inv_sqrt, "mcd")
    if rng is None:
        rng = np.random.default_rng(0)

    best_det = np.inf
    best_subset = None
    for _ in range(n_starts):
        seed_idx = rng.choice(n, size=d + 1, replace=False)
        # Grow a singular elemental start until its covariance has full rank.
        idx = np.array(sorted(seed_idx))
        while idx.size < n:
            sigma = np.cov(x[idx], rowvar=False, ddof=1)
            if np.linalg.matrix_rank(sigma) == d:
                break
            extra = rng.choice(np.setdiff1d(np.arange(n), idx), size=1)
            idx = np.sort(np.append(idx, extra))
        if idx.size >= h:
            subset = idx[:h] if idx.size > h else idx
        else:
            subset = idx
        # First C-step maps the elemental start to a size-h subset.
        mu = x[subset].mean(axis=0)
        sigma = np.cov(x[subset], rowvar=False, ddof=1)
        try:
            inv = np.linalg.inv(sigma)
        except np.linalg.LinAlgError:
            continue
        dx = x - mu
        d2 = np.einsum("ij,jk,ik->i", dx, inv, dx)
        subset = np.sort(np.argpartition(d2, h - 1)[:h])
        subset, det, trace = _c_steps(x, subset, h)
        if _collect_traces is not None:
            _collect_traces.append(trace)
        if det < best_det:
            best_det = det
            best_subset = subset
    if best_subset is None:
        raise DegenerateDataError("every MCD start produced a singular subset")

    mu = x[best_subset].mean(axis=0)
    sigma = np.cov(x[best_subset], rowvar=False, ddof=1)
    # Distances of ALL points against the subset estimate: their median is
    # what the chi-square median calibrates, restoring full-sample scale.
    dx = x - mu
    inv = np.linalg.inv(sigma)
    d2 = np.einsum("ij,jk,ik->i", dx, inv, dx)
    sigma = sigma * (np.median(d2) / chi2_median(d))
    return _finish(mu, sigma, "mcd")


def scatter_estimate(data, kind: str, fraction: float = 0.75, rng=None) -> ScatterEstimate:
    """Dispatch helper: ``moment``, ``mcd``, or ``none``."""
    if kind == "moment":
        return moment_estimate(data)
    if kind == "mcd":
        return mcd_estimate(data, fraction=fraction, rng=rng)
    if kind == "none":
        return identity_estimate(_as_values(data).shape[1])
    raise ParameterError(f"`estimator` must be moment, mcd, or none, got {kind!r}")
