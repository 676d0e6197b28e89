"""Spatial depth, its kernelized local version, and class potentials."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..estimators import ScatterEstimate, inv_sqrt

__all__ = ["depth_spatial", "depth_spatial_local", "potential"]


def _as_array(data) -> np.ndarray:
    values = getattr(data, "values", data)
    return np.asarray(values, dtype=float)


def _standardized_diffs(pts: np.ndarray, x: np.ndarray, est: ScatterEstimate) -> np.ndarray:
    """Array of shape (m, n, d): ``S^{-1/2} (z_k - x_i)`` for every pair."""
    if pts.shape[1] != x.shape[1]:
        raise ParameterError(
            f"query dimension {pts.shape[1]} does not match data dimension {x.shape[1]}"
        )
    diff = pts[:, None, :] - x[None, :, :]
    if est.kind == "none":
        return diff
    # einsum: per-element reduction order does not depend on the batch size,
    # keeping batch rows bitwise equal to standalone calls.
    return np.einsum("mnd,ed->mne", diff, est.sigma_inv_sqrt)


def depth_spatial(z, data, est: ScatterEstimate) -> np.ndarray | float:
    """``1 - || mean of unit vectors of S^{-1/2}(z - x_i) ||``.

    Zero differences contribute a zero vector (the convention ``v(0) = 0``),
    so the depth of a sample point is well defined.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    t = _standardized_diffs(pts, x, est)
    norms = np.linalg.norm(t, axis=2)
    safe = np.where(norms > 0, norms, 1.0)
    units = t / safe[:, :, None]
    units[norms == 0] = 0.0
    avg = units.mean(axis=1)
    out = 1.0 - np.linalg.norm(avg, axis=1)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if single else out


def depth_spatial_local(z, data, est: ScatterEstimate, h: float) -> np.ndarray | float:
    """Kernelized spatial depth with a Gaussian kernel of bandwidth ``h``.

    With ``t_i = S^{-1/2}(z - x_i)`` and ``K_h`` the scaled Gaussian kernel,
    the value is ``mean K_h(t_i) - || mean K_h(t_i) v(t_i) ||``, multiplied
    by ``h^d`` when ``h > 1``.
    """
    if h is None or h <= 0:
        raise ParameterError(f"`bandwidth` must be positive, got {h}")
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    d = x.shape[1]
    t = _standardized_diffs(pts, x, est)
    norms = np.linalg.norm(t, axis=2)
    k = (2.0 * np.pi * h * h) ** (-d / 2.0) * np.exp(-0.5 * (norms / h) ** 2)
    safe = np.where(norms > 0, norms, 1.0)
    units = t / safe[:, :, None]
    units[norms == 0] = 0.0
    first = k.mean(axis=1)
    second = np.linalg.norm((k[:, :, None] * units).mean(axis=1), axis=1)
    out = first - second
    if h > 1:
        out = out * h**d
    out = np.maximum(out, 0.0)
    return float(out[0]) if single else out


def potential(z, class_data, prior: float, h: float,
              class_sigma: np.ndarray | None = None) -> np.ndarray | float:
    """Prior-weighted Gaussian kernel density of one class at ``z``.

    The kernel matrix is ``H = h^2 * Sigma_j`` with ``Sigma_j`` the class
    moment scatter (pass ``class_sigma`` to reuse a precomputed one). The
    value is ``prior * (1/n_j) * sum_i K_H(z - x_i)``, so summing over
    classes with priors ``n_j / n`` recovers the pooled-mixture density
    estimate.
    """
    if h is None or h <= 0:
        raise ParameterError(f"`bandwidth` must be positive, got {h}")
    if not 0 < prior <= 1:
        raise ParameterError(f"`prior` must lie in (0, 1], got {prior}")
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(class_data)
    n_j, d = x.shape
    if class_sigma is None:
        if n_j < 2:
            raise ParameterError("potential needs n >= 2 per class unless `class_sigma` is given")
        class_sigma = np.cov(x, rowvar=False, ddof=1).reshape(d, d)
    H = h * h * np.asarray(class_sigma, dtype=float)
    root = inv_sqrt(H)  # raises DegenerateDataError on singular class scatter
    det_h = 1.0 / np.linalg.det(root) ** 2
    diff = np.einsum("mnd,ed->mne", pts[:, None, :] - x[None, :, :], root)
    expo = np.einsum("mnd,mnd->mn", diff, diff)
    k = (2.0 * np.pi) ** (-d / 2.0) * det_h**-0.5 * np.exp(-0.5 * expo)
    out = prior * k.mean(axis=1)
    return float(out[0]) if single else out
