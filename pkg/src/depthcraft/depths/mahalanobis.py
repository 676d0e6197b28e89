"""Mahalanobis depth."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError
from ..estimators import ScatterEstimate

__all__ = ["depth_mahalanobis"]


def depth_mahalanobis(z, data, est: ScatterEstimate) -> np.ndarray | float:
    """Depth ``1 / (1 + (z - mu)' S^-1 (z - mu))`` for one or many queries.

    ``data`` is accepted for interface symmetry; the depth only depends on
    the location/scatter estimate, which should have been computed from it.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    if pts.shape[1] != est.d:
        raise ParameterError(
            f"query dimension {pts.shape[1]} does not match estimate dimension {est.d}"
        )
    dx = pts - est.mu
    d2 = np.einsum("ij,jk,ik->i", dx, est.sigma_inv, dx)
    out = 1.0 / (1.0 + np.maximum(d2, 0.0))
    return float(out[0]) if single else out
