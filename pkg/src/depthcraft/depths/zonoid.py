"""Zonoid depth through a small linear program."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterError, SolverError
from ..simplexlp import solve_bounded_lp

__all__ = ["depth_zonoid", "in_convex_hull"]


def _as_array(data) -> np.ndarray:
    return np.asarray(getattr(data, "values", data), dtype=float)


def _zonoid_objective(z: np.ndarray, x: np.ndarray, stop_objective=None):
    """Optimal value of: maximize sum(nu), nu in [0,1]^n, sum nu_i (x_i - z) = 0.

    Substituting ``nu_i = lambda_i / t`` in the classic formulation (minimize
    ``t`` over convex weights ``lambda <= t`` reproducing ``z``) shows the
    optimum equals ``1/t*``; the depth is the optimum divided by ``n``. The
    reformulation is feasible for every input (``nu = 0``), reaches 0 exactly
    when ``z`` is outside the convex hull, and needs only ``d`` equality rows.
    """
    n, d = x.shape
    scale = max(float(np.abs(x).max()), float(np.abs(z).max()), 1.0)
    A = (x - z).T / scale
    res = solve_bounded_lp(A, np.zeros(d), np.ones(n), np.ones(n),
                           stop_objective=stop_objective)
    if res.status in ("optimal", "early"):
        return res.objective
    # One perturbation retry before giving up, per the documented contract.
    jitter = 1e-12 * scale * np.sin(np.arange(d) + 1.0)
    A2 = (x - (z + jitter)).T / scale
    res = solve_bounded_lp(A2, np.zeros(d), np.ones(n), np.ones(n),
                           stop_objective=stop_objective)
    if res.status in ("optimal", "early"):
        return res.objective
    raise SolverError(f"zonoid LP failed with status {res.status!r}")


def depth_zonoid(z, data) -> np.ndarray | float:
    """Largest ``alpha`` whose zonoid trimmed region still contains ``z``.

    Equals ``1/(n t*)`` for the minimal uniform weight bound ``t*`` that can
    reproduce ``z`` as a convex combination of the data; ``0`` when ``z``
    lies outside the convex hull. Any point inside the hull has depth at
    least ``1/n``, so optima below 1 are the outside case.
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
    out = np.empty(pts.shape[0])
    for m in range(pts.shape[0]):
        opt = _zonoid_objective(pts[m], x)
        out[m] = 0.0 if opt < 1.0 - 1e-9 else min(opt / n, 1.0)
    return float(out[0]) if single else out


def in_convex_hull(z, data) -> np.ndarray | bool:
    """Membership test ``z in conv(data)`` via the zonoid program.

    Any hull member admits weights with objective at least 1, so the solver
    can stop as soon as the objective crosses that line.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    x = _as_array(data)
    out = np.empty(pts.shape[0], dtype=bool)
    for m in range(pts.shape[0]):
        opt = _zonoid_objective(pts[m], x, stop_objective=1.0 - 1e-9)
        out[m] = opt >= 1.0 - 1e-9
    return bool(out[0]) if single else out
