"""Simplicial depth and simplicial volume depth."""

from __future__ import annotations

from itertools import combinations, islice
from math import comb, factorial

import numpy as np

from ..errors import DegenerateDataError, ParameterError, SizeError
from ..estimators import ScatterEstimate

__all__ = ["depth_simplicial", "depth_simplicial_volume", "random_tuples"]

_BATCH = 65536


def _as_array(data) -> np.ndarray:
    return np.asarray(getattr(data, "values", data), dtype=float)


def _combo_batches(n: int, r: int, batch: int = _BATCH):
    it = combinations(range(n), r)
    while True:
        block = list(islice(it, batch))
        if not block:
            return
        yield np.asarray(block, dtype=np.intp)


def random_tuples(n: int, r: int, k: int, rng) -> np.ndarray:
    """``k`` random index tuples of ``r`` distinct members of ``0..n-1``."""
    # Column-slice of a random permutation per row: uniform over ordered
    # r-subsets, which is all the hit test needs.
    keys = rng.random((k, n))
    return np.argsort(keys, axis=1, kind="stable")[:, :r]


def _contains_counts(x: np.ndarray, z: np.ndarray, idx: np.ndarray, scale: float) -> int:
    """Number of index tuples whose closed simplex contains ``z``.

    Nondegenerate simplices use the barycentric sign test. Degenerate ones
    (volume below tolerance) still count when ``z`` lies in the convex hull
    of their vertices, decided by an exact membership program, so the count
    means closed containment for every input.
    """
    from .zonoid import in_convex_hull

    d = x.shape[1]
    verts = x[idx]                                   # (B, d+1, d)
    mats = np.concatenate(
        [verts.transpose(0, 2, 1), np.ones((idx.shape[0], 1, d + 1))], axis=1
    )                                                # (B, d+1, d+1)
    rhs = np.concatenate([z, [1.0]]).reshape(1, d + 1, 1)
    dets = np.linalg.det(mats)
    good = np.abs(dets) > 1e-12 * max(scale, 1.0) ** d
    hits = 0
    if np.any(good):
        lam = np.linalg.solve(mats[good], np.broadcast_to(rhs, (int(good.sum()), d + 1, 1)))
        hits = int(np.sum(np.all(lam[:, :, 0] >= -1e-12, axis=1)))
    for flat in np.flatnonzero(~good):
        if in_convex_hull(z, verts[flat]):
            hits += 1
    return hits


def depth_simplicial(z, data, exact: bool = True, simplex_count: float = 1000,
                     rng=None, cap: int = 10**7,
                     tuples: np.ndarray | None = None) -> np.ndarray | float:
    """Fraction of vertex simplices whose closed hull contains ``z``.

    Exact mode enumerates all ``C(n, d+1)`` simplices, except at ``d = 2``
    where the complement is counted in O(n^2) sign tests: a triangle misses
    ``z`` exactly when its three direction vectors fit in an open halfplane,
    and each such triangle has a unique leading vertex whose forward open
    half-turn contains the other two. Approximate mode samples
    ``simplex_count`` random simplices (a count if > 1, a fraction of all
    simplices if in (0, 1)).
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    n, d = x.shape
    if pts.shape[1] != d:
        raise ParameterError(
            f"query dimension {pts.shape[1]} does not match data dimension {d}"
        )
    if n < d + 1:
        raise ParameterError(f"simplicial depth needs n >= d+1 = {d + 1}, got n={n}")
    total = comb(n, d + 1)
    scale = max(float(np.abs(x).max()), float(np.abs(pts).max()), 1.0)

    out = np.empty(pts.shape[0])
    if exact and d == 2:
        for m in range(pts.shape[0]):
            out[m] = _simplicial_2d(x, pts[m], total)
    elif exact:
        if total > cap:
            raise SizeError(
                f"exact simplicial depth would enumerate {total} simplices "
                f"(cap {cap}); use the approximation"
            )
        for m in range(pts.shape[0]):
            hits = 0
            for idx in _combo_batches(n, d + 1):
                hits += _contains_counts(x, pts[m], idx, scale)
            out[m] = hits / total
    else:
        if tuples is None:
            if rng is None:
                rng = np.random.default_rng(0)
            k = int(simplex_count) if simplex_count > 1 else int(np.ceil(simplex_count * total))
            k = max(k, 1)
            tuples = random_tuples(n, d + 1, k, rng)
        for m in range(pts.shape[0]):
            hits = 0
            for lo in range(0, tuples.shape[0], _BATCH):
                hits += _contains_counts(x, pts[m], tuples[lo:lo + _BATCH], scale)
            out[m] = hits / tuples.shape[0]
    return float(out[0]) if single else out


def _simplicial_2d(x: np.ndarray, z: np.ndarray, total: int) -> float:
    w = x - z
    norms = np.linalg.norm(w, axis=1)
    scale = max(float(norms.max()), 1.0)
    keep = norms > 1e-12 * scale
    w = w[keep]
    m = w.shape[0]
    if m < 3:
        return 1.0  # every triangle uses a vertex at z itself
    cross = w[:, 0][:, None] * w[:, 1][None, :] - w[:, 1][:, None] * w[:, 0][None, :]
    dot = w @ w.T
    tol = 1e-12 * np.outer(norms[keep], norms[keep])
    ahead = cross > tol
    # Duplicate directions: break the tie by index so each halfplane-coverable
    # triangle keeps exactly one leading vertex.
    same_dir = (np.abs(cross) <= tol) & (dot > 0)
    upper = np.arange(m)[None, :] > np.arange(m)[:, None]
    counts = (ahead | (same_dir & upper)).sum(axis=1)
    misses = int(np.sum(counts * (counts - 1) // 2))
    return (total - misses) / total


def depth_simplicial_volume(z, data, est: ScatterEstimate, exact: bool = True,
                            simplex_count: float = 1000, rng=None,
                            cap: int = 10**7,
                            tuples: np.ndarray | None = None) -> np.ndarray | float:
    """``1 / (1 + A)`` with ``A`` the normalized mean simplex volume.

    ``A`` averages ``|det(x_S - z)| / d!`` over all ``C(n, d)`` subsets
    ``S`` of ``d`` sample points (or random ones in approximate mode) and is
    divided by ``sqrt(det Sigma)``, which cancels any affine map applied to
    data and query alike.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    n, d = x.shape
    if pts.shape[1] != d:
        raise ParameterError(
            f"query dimension {pts.shape[1]} does not match data dimension {d}"
        )
    if n < d:
        raise ParameterError(f"simplicial volume depth needs n >= d = {d}, got n={n}")
    det_sigma = float(np.linalg.det(est.sigma))
    if det_sigma <= 0:
        raise DegenerateDataError("scatter determinant is not positive")
    norm = np.sqrt(det_sigma) * factorial(d)
    total = comb(n, d)

    out = np.empty(pts.shape[0])
    if exact:
        if total > cap:
            raise SizeError(
                f"exact simplicial volume depth would enumerate {total} subsets "
                f"(cap {cap}); use the approximation"
            )
        for m in range(pts.shape[0]):
            acc = 0.0
            for idx in _combo_batches(n, d):
                edges = x[idx] - pts[m]          # (B, d, d)
                acc += float(np.abs(np.linalg.det(edges)).sum())
            out[m] = 1.0 / (1.0 + acc / (total * norm))
    else:
        if tuples is None:
            if rng is None:
                rng = np.random.default_rng(0)
            k = int(simplex_count) if simplex_count > 1 else int(np.ceil(simplex_count * total))
            k = max(k, 1)
            tuples = random_tuples(n, d, k, rng)
        for m in range(pts.shape[0]):
            acc = 0.0
            for lo in range(0, tuples.shape[0], _BATCH):
                edges = x[tuples[lo:lo + _BATCH]] - pts[m]
                acc += float(np.abs(np.linalg.det(edges)).sum())
            out[m] = 1.0 / (1.0 + acc / (tuples.shape[0] * norm))
    return float(out[0]) if single else out
