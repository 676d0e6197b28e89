"""Zonoid depth: LP properties, feasibility-grid oracle, hull membership."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.random import default_rng
from scipy.optimize import linprog

from depthcraft.depths.zonoid import depth_zonoid, in_convex_hull
from tests.conftest import gauss_cloud

# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def hull_member_oracle(z, x):
    """Convex-hull membership as an LP feasibility question (scipy)."""
    n, d = x.shape
    res = linprog(np.zeros(n), A_eq=np.vstack([x.T, np.ones((1, n))]),
                  b_eq=np.append(z, 1.0), bounds=[(0, None)] * n,
                  method="highs")
    return res.status == 0


def zonoid_grid_oracle(z, x, resolution):
    """Largest alpha on a grid whose weight-capped combination reaches z."""
    n, d = x.shape
    best = 0.0
    for k in range(1, resolution + 1):
        alpha = k / resolution
        res = linprog(np.zeros(n), A_eq=np.vstack([x.T, np.ones((1, n))]),
                      b_eq=np.append(z, 1.0),
                      bounds=[(0, 1.0 / (n * alpha))] * n, method="highs")
        if res.status == 0:
            best = alpha
        else:
            break
    return best


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(10))
def test_depth_at_mean_is_one(seed):
    x = gauss_cloud(20, int(default_rng(seed).integers(1, 5)), seed=seed)
    assert depth_zonoid(x.mean(axis=0), x) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(12))
def test_matches_feasibility_grid_oracle(seed):
    rng = default_rng(seed)
    n = int(rng.integers(4, 12))
    d = int(rng.integers(1, 4))
    x = rng.standard_normal((n, d))
    z = x.mean(axis=0) + rng.standard_normal(d) * 0.3
    got = depth_zonoid(z, x)
    want = zonoid_grid_oracle(z, x, resolution=100)
    assert abs(got - want) <= 1 / 100 + 1e-9


def test_zero_outside_hull_exactly():
    x = gauss_cloud(25, 2, seed=3)
    far = x.max(axis=0) + 1.0
    assert depth_zonoid(far, x) == 0.0


def test_vertex_of_convex_position_has_depth_one_over_n():
    # points on a circle: every point is a hull vertex
    t = np.linspace(0, 2 * np.pi, 9)[:-1]
    x = np.column_stack([np.cos(t), np.sin(t)])
    for i in range(8):
        assert depth_zonoid(x[i], x) == pytest.approx(1 / 8, abs=1e-9)


def test_monotone_along_segment_to_mean():
    x = gauss_cloud(30, 2, seed=4)
    mean = x.mean(axis=0)
    target = x[0]
    vals = [depth_zonoid(mean + t * (target - mean), x)
            for t in np.linspace(0, 1, 8)]
    assert all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))


def test_batch_equals_scalar_loop_bitwise():
    x = gauss_cloud(20, 2, seed=5)
    pts = default_rng(6).standard_normal((15, 2)) * 0.8
    batch = depth_zonoid(pts, x)
    single = np.array([depth_zonoid(p, x) for p in pts])
    assert np.array_equal(batch, single)


def test_depth_range():
    x = gauss_cloud(30, 3, seed=7)
    pts = default_rng(8).standard_normal((50, 3)) * 2
    vals = depth_zonoid(pts, x)
    assert np.all(vals >= 0) and np.all(vals <= 1 + 1e-12)


# ---------------------------------------------------------------------------
# convex hull membership
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(15))
def test_hull_membership_matches_lp_oracle(seed):
    rng = default_rng(500 + seed)
    n = int(rng.integers(4, 15))
    d = int(rng.integers(1, 4))
    x = rng.standard_normal((n, d))
    z = rng.standard_normal(d) * rng.uniform(0.2, 2.0)
    assert in_convex_hull(z, x) == hull_member_oracle(z, x)


def test_hull_membership_batch():
    x = gauss_cloud(20, 2, seed=9)
    pts = np.vstack([x.mean(axis=0), x.max(axis=0) + 5.0, x[3]])
    flags = in_convex_hull(pts, x)
    assert flags.dtype == bool
    assert list(flags) == [True, False, True]


def test_hull_membership_consistent_with_zero_depth():
    x = gauss_cloud(15, 2, seed=10)
    pts = default_rng(11).standard_normal((40, 2)) * 2
    depths = depth_zonoid(pts, x)
    flags = in_convex_hull(pts, x)
    assert np.array_equal(flags, depths > 0)
