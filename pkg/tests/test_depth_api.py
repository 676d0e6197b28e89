"""Depth orchestration: spec validation, frozen statistics, batch identity."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.random import default_rng

from depthcraft.datamodel import LabeledSample
from depthcraft.depths.api import (depth, depth_rows, depth_space, eval_depth,
                                   freeze_cloud)
from depthcraft.depths.spec import NOTIONS, DepthSpec
from depthcraft.errors import ParameterError
from tests.conftest import gauss_cloud, random_affine

_FAST_SPECS = [
    DepthSpec(notion="mahalanobis"),
    DepthSpec(notion="mahalanobis", estimator="mcd"),
    DepthSpec(notion="projection", num_directions=100),
    DepthSpec(notion="spatial"),
    DepthSpec(notion="spatial", estimator="none"),
    DepthSpec(notion="halfspace"),
    DepthSpec(notion="halfspace", exact=False, num_directions=100),
    DepthSpec(notion="simplicial"),
    DepthSpec(notion="simplicial", exact=False, simplex_count=500),
    DepthSpec(notion="simplicial-volume"),
    DepthSpec(notion="zonoid"),
    DepthSpec(notion="spatial-local", bandwidth=1.0),
    DepthSpec(notion="potential", bandwidth=1.0),
]

# ---------------------------------------------------------------------------
# DepthSpec validation
# ---------------------------------------------------------------------------


def test_spec_accepts_every_notion():
    for notion in NOTIONS:
        kw = {"bandwidth": 1.0} if notion in ("spatial-local", "potential") else {}
        assert DepthSpec(notion=notion, **kw).notion == notion


def test_spec_rejects_unknown_notion_and_estimator():
    with pytest.raises(ParameterError):
        DepthSpec(notion="tukey")
    with pytest.raises(ParameterError):
        DepthSpec(notion="spatial", estimator="median")


def test_spec_estimator_none_only_for_spatial_variants():
    DepthSpec(notion="spatial", estimator="none")
    DepthSpec(notion="spatial-local", estimator="none", bandwidth=1.0)
    for notion in ("mahalanobis", "halfspace", "zonoid", "simplicial-volume"):
        with pytest.raises(ParameterError):
            DepthSpec(notion=notion, estimator="none")


def test_spec_bandwidth_rules():
    with pytest.raises(ParameterError):
        DepthSpec(notion="spatial-local")
    with pytest.raises(ParameterError):
        DepthSpec(notion="potential", bandwidth=-1.0)
    with pytest.raises(ParameterError):
        DepthSpec(notion="halfspace", bandwidth=1.0)


def test_spec_projection_has_no_exact_mode():
    with pytest.raises(ParameterError):
        DepthSpec(notion="projection", exact=True)
    assert DepthSpec(notion="projection").wants_exact is False
    assert DepthSpec(notion="halfspace").wants_exact is True
    assert DepthSpec(notion="halfspace", exact=False).wants_exact is False


def test_spec_count_validation():
    with pytest.raises(ParameterError):
        DepthSpec(notion="projection", num_directions=0)
    with pytest.raises(ParameterError):
        DepthSpec(notion="simplicial", simplex_count=1.0)
    with pytest.raises(ParameterError):
        DepthSpec(notion="simplicial", simplex_count=-3)
    with pytest.raises(ParameterError):
        DepthSpec(notion="mahalanobis", mcd_fraction=0.5)


# ---------------------------------------------------------------------------
# freezing and evaluation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("spec", _FAST_SPECS, ids=lambda s: f"{s.notion}-{s.estimator}-{s.exact}")
def test_depth_equals_frozen_evaluation(spec):
    x = gauss_cloud(25, 2, seed=1)
    z = np.array([0.4, -0.3])
    stats = freeze_cloud(x, spec)
    assert depth(z, x, spec) == eval_depth(z, stats)


@pytest.mark.parametrize("spec", _FAST_SPECS, ids=lambda s: f"{s.notion}-{s.estimator}-{s.exact}")
def test_depth_rows_bitwise_equal_single_calls(spec):
    x = gauss_cloud(25, 2, seed=2)
    y = gauss_cloud(20, 2, seed=3) + 1.0
    pts = default_rng(4).standard_normal((12, 2))
    stats = [freeze_cloud(x, spec), freeze_cloud(y, spec)]
    rows = depth_rows(pts, stats)
    for j, st in enumerate(stats):
        single = np.array([eval_depth(p, st) for p in pts])
        assert np.array_equal(rows[:, j], single), spec.notion


def test_depth_rows_threading_is_bitwise_stable():
    spec = DepthSpec(notion="zonoid")
    x = gauss_cloud(30, 2, seed=5)
    pts = default_rng(6).standard_normal((40, 2))
    stats = [freeze_cloud(x, spec)]
    assert np.array_equal(depth_rows(pts, stats, threads=1),
                          depth_rows(pts, stats, threads=4))


def test_freeze_cloud_deterministic():
    spec = DepthSpec(notion="projection", num_directions=50, seed=9)
    x = gauss_cloud(20, 3, seed=7)
    a = freeze_cloud(x, spec)
    b = freeze_cloud(x, spec)
    assert np.array_equal(a.directions, b.directions)
    z = np.array([0.1, 0.2, 0.3])
    assert eval_depth(z, a) == eval_depth(z, b)


def test_depth_space_entries_match_standalone_depths():
    rng = default_rng(8)
    data = np.vstack([rng.standard_normal((12, 2)),
                      rng.standard_normal((15, 2)) + 2.0])
    sample = LabeledSample(data, [1] * 12 + [2] * 15)
    for spec in (DepthSpec(notion="mahalanobis"), DepthSpec(notion="halfspace")):
        space = depth_space(sample, spec)
        assert space.depths.shape == (27, 2)
        for j in (1, 2):
            cloud = sample.class_rows(j)
            want = np.array([depth(p, cloud, spec) for p in data])
            assert np.array_equal(space.depths[:, j - 1], want)


def test_depth_space_potential_uses_pooled_transform_and_priors():
    rng = default_rng(9)
    data = np.vstack([rng.standard_normal((10, 2)),
                      rng.standard_normal((20, 2)) + 1.5])
    sample = LabeledSample(data, [1] * 10 + [2] * 20)
    spec = DepthSpec(notion="potential", bandwidth=1.0)
    space = depth_space(sample, spec)
    assert np.all(space.depths > 0)
    # priors scale each column: class 2 has twice the weight of class 1
    col_at_own_mean_1 = space.depths[:10, 0]
    assert np.all(np.isfinite(col_at_own_mean_1))


def test_threads_validation():
    x = gauss_cloud(10, 2, seed=10)
    stats = [freeze_cloud(x, DepthSpec(notion="spatial"))]
    with pytest.raises(ParameterError):
        depth_rows(np.zeros((3, 2)), stats, threads=0)


def test_query_dimension_mismatch():
    x = gauss_cloud(10, 2, seed=11)
    with pytest.raises(ParameterError):
        depth(np.zeros(3), x, DepthSpec(notion="spatial"))


# ---------------------------------------------------------------------------
# affine invariance (fast version; the full suite runs in acceptance)
# ---------------------------------------------------------------------------

_INVARIANT_SPECS = [
    DepthSpec(notion="mahalanobis"),
    DepthSpec(notion="spatial"),
    DepthSpec(notion="halfspace"),
    DepthSpec(notion="simplicial"),
    DepthSpec(notion="simplicial-volume"),
    DepthSpec(notion="zonoid"),
]


@pytest.mark.parametrize("spec", _INVARIANT_SPECS, ids=lambda s: s.notion)
def test_affine_invariance(spec):
    rng = default_rng(12)
    for _ in range(10):
        x = rng.standard_normal((12, 2))
        z = x.mean(axis=0) + rng.standard_normal(2) * 0.5
        a, b = random_affine(2, rng)
        before = depth(z, x, spec)
        after = depth(a @ z + b, x @ a.T + b, spec)
        assert abs(after - before) <= 1e-9, spec.notion
