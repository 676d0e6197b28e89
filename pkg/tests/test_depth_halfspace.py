"""Halfspace depth: brute-force direction oracles and the exact/approx order."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.random import default_rng

from depthcraft.depths.halfspace import (depth_halfspace_approx,
                                         depth_halfspace_exact)
from depthcraft.errors import SizeError
from tests.conftest import gauss_cloud


def brute_force_2d(z, x):
    """Minimum one-sided count over every candidate direction from pairs.

    In the plane the minimizing closed halfplane can always be rotated
    until its boundary touches a sample point (or the query), so normals
    perpendicular to all point-to-point and point-to-query differences,
    in both orientations and with tiny tilts to either side, cover every
    combinatorially distinct halfplane.
    """
    n = x.shape[0]
    pools = [x - z]
    diffs = [x[i] - x[j] for i in range(n) for j in range(i + 1, n)]
    if diffs:
        pools.append(np.asarray(diffs))
    cands = []
    for v in np.vstack(pools):
        norm = np.hypot(v[0], v[1])
        if norm == 0:
            continue
        u = np.array([-v[1], v[0]]) / norm
        for tilt in (-1e-9, 0.0, 1e-9):
            c, s = np.cos(tilt), np.sin(tilt)
            r = np.array([u[0] * c - u[1] * s, u[0] * s + u[1] * c])
            cands.append(r)
            cands.append(-r)
    best = n
    w = x - z
    for u in cands:
        proj = w @ u
        best = min(best, int(np.count_nonzero(proj >= -1e-12 * max(1.0, np.abs(proj).max()))))
    return best / n


@pytest.mark.parametrize("seed", range(25))
def test_exact_2d_matches_pair_direction_brute_force(seed):
    rng = default_rng(seed)
    n = int(rng.integers(4, 20))
    x = rng.standard_normal((n, 2)) * rng.uniform(0.5, 3.0)
    z = rng.standard_normal(2) * 1.5
    assert depth_halfspace_exact(z, x) == pytest.approx(
        brute_force_2d(z, x), abs=1e-12)


def test_exact_1d_formula():
    x = np.array([[0.0], [1.0], [2.0], [3.0], [10.0]])
    # closed halfline counts: min(#<=z, #>=z) / n
    assert depth_halfspace_exact(np.array([2.0]), x) == pytest.approx(3 / 5)
    assert depth_halfspace_exact(np.array([-1.0]), x) == 0.0
    assert depth_halfspace_exact(np.array([1.5]), x) == pytest.approx(2 / 5)


@pytest.mark.parametrize("seed", range(10))
def test_exact_3d_never_exceeds_approximation(seed):
    rng = default_rng(200 + seed)
    x = rng.standard_normal((25, 3))
    z = rng.standard_normal(3)
    exact = depth_halfspace_exact(z, x)
    approx = depth_halfspace_approx(z, x, k=1000, rng=default_rng(seed))
    assert exact <= approx + 1e-12


def test_exact_3d_against_2d_embedding():
    # data in the z3 = 0 plane: depth equals the planar depth
    rng = default_rng(17)
    flat = rng.standard_normal((15, 2))
    x3 = np.column_stack([flat, np.zeros(15)])
    z = rng.standard_normal(2)
    want = depth_halfspace_exact(z, flat)
    got = depth_halfspace_exact(np.array([z[0], z[1], 0.0]), x3)
    assert got == pytest.approx(want, abs=1e-12)


def test_zero_outside_hull():
    x = gauss_cloud(30, 2, seed=3)
    far = x.max(axis=0) + 10.0
    assert depth_halfspace_exact(far, x) == 0.0
    assert depth_halfspace_approx(far, x, k=500, rng=default_rng(0)) == 0.0


def test_sample_point_has_positive_depth():
    x = gauss_cloud(20, 2, seed=4)
    assert depth_halfspace_exact(x[0], x) >= 1 / 20


def test_size_cap_raises():
    x = gauss_cloud(80, 3, seed=5)
    with pytest.raises(SizeError, match="cap"):
        depth_halfspace_exact(np.zeros(3), x, cap=60)
    # a raised cap lets the same call through
    v = depth_halfspace_exact(np.zeros(3), x, cap=100)
    assert 0.0 <= v <= 0.5


def test_approx_deterministic_and_batch_bitwise():
    x = gauss_cloud(40, 3, seed=6)
    pts = default_rng(7).standard_normal((12, 3))
    a = depth_halfspace_approx(pts, x, k=300, rng=default_rng(9))
    b = depth_halfspace_approx(pts, x, k=300, rng=default_rng(9))
    assert np.array_equal(a, b)
    single = np.array([depth_halfspace_approx(p, x, k=300, rng=default_rng(9))
                       for p in pts])
    assert np.array_equal(a, single)


def test_exact_batch_equals_scalar_loop():
    x = gauss_cloud(18, 2, seed=8)
    pts = default_rng(10).standard_normal((9, 2))
    batch = depth_halfspace_exact(pts, x)
    single = np.array([depth_halfspace_exact(p, x) for p in pts])
    assert np.array_equal(batch, single)


def test_center_of_simplex_3d():
    # regular tetrahedron: center depth is 1/4 (one vertex per halfspace)
    x = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                  [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    assert depth_halfspace_exact(np.zeros(3), x) == pytest.approx(0.25)
