"""A small derivative-free simplex minimizer used by a couple of modules."""

from __future__ import annotations

import numpy as np

__all__ = ["nelder_mead"]


def nelder_mead(fn, x0, max_iter: int = 200, initial_step: float = 0.25,
                xatol: float = 1e-9, fatol: float = 1e-12):
    """Minimize ``fn`` from ``x0`` with the reflection/expansion/contraction
    simplex scheme (coefficients 1, 2, 0.5, 0.5).

    Returns ``(x_best, f_best)``. The iteration budget counts simplex update
    steps, not function evaluations.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    k = x0.size
    if k == 0:
        return x0, float(fn(x0))

    simplex = [x0]
    for i in range(k):
        step = np.zeros(k)
        step[i] = initial_step if x0[i] == 0 else initial_step * max(1.0, abs(x0[i]))
        simplex.append(x0 + step)
    simplex = np.asarray(simplex)
    values = np.array([float(fn(p)) for p in simplex])

    for _ in range(max_iter):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        if (np.max(np.abs(simplex[1:] - simplex[0])) < xatol
                and np.max(np.abs(values[1:] - values[0])) < fatol):
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        reflected = centroid + (centroid - worst)
        f_r = float(fn(reflected))
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = float(fn(expanded))
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_c = float(fn(contracted))
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
            else:
                # Shrink toward the best vertex.
                for i in range(1, k + 1):
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = float(fn(simplex[i]))

    best = int(np.argmin(values))
    return simplex[best].copy(), float(values[best])
