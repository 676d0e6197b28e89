"""Halfspace depth: exact by candidate enumeration, approximate by projections.

The exact depth of ``z`` is ``min_u #{i: (x_i - z)'u <= 0} / n``. Writing
``W`` for the nonzero centered rows, that is ``(n - M)/n`` where ``M`` is the
maximum over directions ``u`` of the number of rows with ``W_i'u > 0``. The
maximum is always attained in the limit at a direction orthogonal to some
rank-``(d-1)`` subset of rows, with the subset rows (and any other rows that
happen to lie on the boundary hyperplane) resolved by an infinitesimal
rotation toward the open side. The resolution itself is the same problem one
dimension down, so the enumeration recurses on the boundary rows instead of
perturbing by a finite epsilon; every comparison is a plain sign test, which
keeps ties (duplicate points, points collinear with ``z``) exact.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import ParameterError, SizeError

__all__ = ["depth_halfspace_exact", "depth_halfspace_approx", "max_open_count"]

_REL_TOL = 1e-9
_CHUNK = 4096


def _as_array(data) -> np.ndarray:
    return np.asarray(getattr(data, "values", data), dtype=float)


def _orth_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``u`` (rows)."""
    _, _, vt = np.linalg.svd(u.reshape(1, -1))
    return vt[1:]


def _reduce_rank(w: np.ndarray, tol: float):
    """Project ``w`` onto its row space when it is rank deficient."""
    if w.shape[1] <= 1:
        return w
    _, s, vt = np.linalg.svd(w, full_matrices=False)
    if s[0] <= 0:
        return w[:, :1] * 0.0
    r = int(np.sum(s > tol * s[0]))
    if r < w.shape[1]:
        return w @ vt[:r].T
    return w


def _max_open_1d(col: np.ndarray, scale: np.ndarray) -> int:
    tol = _REL_TOL * scale
    return int(max(np.sum(col > tol), np.sum(col < -tol)))


def _max_open_2d(w: np.ndarray) -> int:
    m = w.shape[0]
    norms = np.linalg.norm(w, axis=1)
    cross = w[:, 0][:, None] * w[:, 1][None, :] - w[:, 1][:, None] * w[:, 0][None, :]
    dot = w @ w.T
    tol = _REL_TOL * norms[:, None] * norms[None, :]
    best = 0
    for i in range(m):
        row = cross[i]
        trow = tol[i]
        pos = int(np.sum(row > trow))
        neg = int(np.sum(row < -trow))
        boundary = np.abs(row) <= trow
        same = int(np.sum(boundary & (dot[i] > 0)))
        opp = int(np.sum(boundary & (dot[i] < 0)))
        push = max(same, opp)
        best = max(best, pos + push, neg + push)
    return best


def _max_open_3d(w: np.ndarray) -> int:
    m = w.shape[0]
    norms = np.linalg.norm(w, axis=1)
    ii, jj = np.triu_indices(m, 1)
    best = 0
    for lo in range(0, ii.size, _CHUNK):
        sel = slice(lo, lo + _CHUNK)
        a, b = ii[sel], jj[sel]
        u = np.cross(w[a], w[b])
        ulen = np.linalg.norm(u, axis=1)
        ok = ulen > _REL_TOL * norms[a] * norms[b]  # skip collinear pairs
        if not np.any(ok):
            continue
        u = u[ok] / ulen[ok][:, None]
        dots = w @ u.T                       # (m, P)
        tol = _REL_TOL * norms[:, None]
        posm = dots > tol
        negm = dots < -tol
        pos = posm.sum(axis=0)
        neg = negm.sum(axis=0)
        nbnd = m - pos - neg
        clean = nbnd == 2
        if np.any(clean):
            val = np.maximum(pos[clean], neg[clean]) + 2
            best = max(best, int(val.max()))
        for c in np.flatnonzero(~clean):
            bnd = ~(posm[:, c] | negm[:, c])
            basis = _orth_basis(u[c])
            push = max_open_count(w[bnd] @ basis.T)
            best = max(best, int(pos[c]) + push, int(neg[c]) + push)
    return best


def max_open_count(w: np.ndarray) -> int:
    """Maximum over unit ``u`` of ``#{i: w_i'u > 0}`` for nonzero rows ``w``."""
    if w.shape[0] == 0:
        return 0
    w = _reduce_rank(np.asarray(w, dtype=float), _REL_TOL)
    k = w.shape[1]
    norms = np.linalg.norm(w, axis=1)
    if k == 1:
        return _max_open_1d(w[:, 0], norms)
    if k == 2:
        return _max_open_2d(w)
    if k == 3:
        return _max_open_3d(w)

    m = w.shape[0]
    best = 0
    for subset in combinations(range(m), k - 1):
        ws = w[list(subset)]
        _, s, vt = np.linalg.svd(ws, full_matrices=True)
        if s[-1] <= _REL_TOL * s[0]:
            continue  # dependent subset; covered by a full-rank one
        u = vt[-1]
        dots = w @ u
        tol = _REL_TOL * norms
        posm = dots > tol
        negm = dots < -tol
        bnd = ~(posm | negm)
        push = max_open_count(w[bnd] @ _orth_basis(u).T) if np.any(bnd) else 0
        best = max(best, int(posm.sum()) + push, int(negm.sum()) + push)
    return best


def depth_halfspace_exact(z, data, cap: int = 60) -> np.ndarray | float:
    """Exact halfspace depth ``min_u #{x_i'u <= z'u} / n``.

    ``d = 1`` reduces to rank counting and ``d = 2`` to a sweep over the
    perpendiculars of the centered rows; for ``d >= 3`` the candidate
    enumeration costs about ``C(n, d-1) * n`` sign tests, so it refuses to
    run above ``cap`` points (raise the cap explicitly for bigger inputs).
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
    if d >= 3 and n > cap:
        raise SizeError(
            f"exact halfspace depth at d={d} is limited to n <= {cap} "
            f"(got n={n}); raise `exact_cap` or use the approximation"
        )
    scale = max(float(np.abs(x).max()), float(np.abs(pts).max()), 1.0)
    out = np.empty(pts.shape[0])
    for idx in range(pts.shape[0]):
        w = x - pts[idx]
        nz = np.linalg.norm(w, axis=1) > 1e-12 * scale
        if not np.any(nz):
            out[idx] = 1.0
            continue
        out[idx] = (n - max_open_count(w[nz])) / n
    return float(out[0]) if single else out


def depth_halfspace_approx(z, data, k: int = 1000, rng=None,
                           directions: np.ndarray | None = None) -> np.ndarray | float:
    """Upper bound on the halfspace depth from ``k`` random directions.

    For each direction the univariate halfspace depth of the projected query
    inside the projected sample is computed exactly; the minimum over
    directions can only overshoot the exact depth, never undershoot it.
    """
    from .projection import uniform_directions

    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    n, d = x.shape
    if pts.shape[1] != d:
        raise ParameterError(
            f"query dimension {pts.shape[1]} does not match data dimension {d}"
        )
    if directions is None:
        if rng is None:
            rng = np.random.default_rng(0)
        directions = uniform_directions(k, d, rng)
    proj = np.sort(np.einsum("nd,kd->nk", x, directions), axis=0)  # sorted per direction
    s = np.einsum("md,kd->mk", pts, directions)
    # einsum on both sides: a query row equal to a data row projects to the
    # bitwise-identical value, so boundary counts stay exact.
    best = np.full(pts.shape[0], n, dtype=float)
    for j in range(directions.shape[0]):
        le = np.searchsorted(proj[:, j], s[:, j], side="right")
        ge = n - np.searchsorted(proj[:, j], s[:, j], side="left")
        best = np.minimum(best, np.minimum(le, ge))
    out = best / n
    return float(out[0]) if single else out
