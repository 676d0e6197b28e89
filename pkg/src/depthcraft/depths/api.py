"""Dispatch layer: frozen per-cloud statistics, `depth`, and `depth_space`."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from ..datamodel import LabeledSample
from ..errors import ParameterError
from ..estimators import ScatterEstimate, inv_sqrt, scatter_estimate
from .halfspace import depth_halfspace_approx, depth_halfspace_exact
from .mahalanobis import depth_mahalanobis
from .projection import depth_projection, projection_stats, uniform_directions
from .simplicial import depth_simplicial, depth_simplicial_volume, random_tuples
from .spatial import depth_spatial, depth_spatial_local, potential
from .spec import DepthSpace, DepthSpec
from .zonoid import depth_zonoid

__all__ = ["CloudStats", "freeze_cloud", "eval_depth", "depth", "depth_space",
           "depth_rows"]

_NEEDS_ESTIMATE = ("mahalanobis", "spatial", "spatial-local", "simplicial-volume")


@dataclass(frozen=True)
class CloudStats:
    """Everything a depth evaluation needs about one reference cloud.

    Built once per (cloud, spec) pair; all randomness (MCD subsampling,
    projection directions, simplex tuples) is drawn here from ``spec.seed``
    and never redrawn, so evaluation is pure and thread-safe.
    """

    spec: DepthSpec
    cloud: np.ndarray
    est: ScatterEstimate | None = None
    directions: np.ndarray | None = None
    proj_stats: tuple | None = None
    tuples: np.ndarray | None = None
    prior: float = 1.0
    class_sigma: np.ndarray | None = None
    pretransform: np.ndarray | None = None


def freeze_cloud(data, spec: DepthSpec, prior: float = 1.0,
                 pretransform: np.ndarray | None = None) -> CloudStats:
    """Compute the frozen statistics of one reference cloud under ``spec``."""
    x = np.asarray(getattr(data, "values", data), dtype=float)
    if x.ndim != 2:
        raise ParameterError("reference cloud must be a 2-D array")
    if pretransform is not None:
        x = x @ pretransform.T
    n, d = x.shape
    rng = np.random.default_rng(spec.seed)

    est = None
    if spec.notion in _NEEDS_ESTIMATE:
        est = scatter_estimate(x, spec.estimator, spec.mcd_fraction, rng=rng)

    directions = None
    proj = None
    if spec.notion == "projection" or (spec.notion == "halfspace" and not spec.wants_exact):
        directions = uniform_directions(spec.num_directions, d, rng)
        if spec.notion == "projection":
            proj = projection_stats(x, directions)

    tuples = None
    if spec.notion in ("simplicial", "simplicial-volume") and not spec.wants_exact:
        r = d + 1 if spec.notion == "simplicial" else d
        total = comb(n, r)
        k = int(spec.simplex_count) if spec.simplex_count > 1 \
            else max(int(np.ceil(spec.simplex_count * total)), 1)
        tuples = random_tuples(n, r, k, rng)

    class_sigma = None
    if spec.notion == "potential":
        sig_est = scatter_estimate(x, spec.estimator, spec.mcd_fraction, rng=rng)
        class_sigma = sig_est.sigma

    return CloudStats(spec=spec, cloud=x, est=est, directions=directions,
                      proj_stats=proj, tuples=tuples, prior=prior,
                      class_sigma=class_sigma, pretransform=pretransform)


def eval_depth(z, stats: CloudStats):
    """Depth of one query (1-D) or a batch (2-D) against frozen statistics."""
    spec = stats.spec
    z = np.asarray(z, dtype=float)
    if stats.pretransform is not None:
        z = np.einsum("...d,ed->...e", z, stats.pretransform)
    notion = spec.notion
    if notion == "mahalanobis":
        return depth_mahalanobis(z, stats.cloud, stats.est)
    if notion == "projection":
        return depth_projection(z, stats.cloud, refine=spec.refine,
                                directions=stats.directions, stats=stats.proj_stats)
    if notion == "spatial":
        return depth_spatial(z, stats.cloud, stats.est)
    if notion == "spatial-local":
        return depth_spatial_local(z, stats.cloud, stats.est, spec.bandwidth)
    if notion == "halfspace":
        if spec.wants_exact:
            return depth_halfspace_exact(z, stats.cloud, cap=spec.exact_cap)
        return depth_halfspace_approx(z, stats.cloud, directions=stats.directions)
    if notion == "simplicial":
        if spec.wants_exact:
            return depth_simplicial(z, stats.cloud, exact=True, cap=spec.simplex_cap)
        return depth_simplicial(z, stats.cloud, exact=False, tuples=stats.tuples)
    if notion == "simplicial-volume":
        if spec.wants_exact:
            return depth_simplicial_volume(z, stats.cloud, stats.est, exact=True,
                                           cap=spec.simplex_cap)
        return depth_simplicial_volume(z, stats.cloud, stats.est, exact=False,
                                       tuples=stats.tuples)
    if notion == "zonoid":
        return depth_zonoid(z, stats.cloud)
    if notion == "potential":
        return potential(z, stats.cloud, stats.prior, spec.bandwidth,
                         class_sigma=stats.class_sigma)
    raise ParameterError(f"unknown notion {notion!r}")  # pragma: no cover


def depth(z, data, spec: DepthSpec, prior: float = 1.0):
    """One-shot depth computation: freeze the cloud, evaluate, return.

    For ``potential`` the prior defaults to 1 (a bare kernel density); the
    class-weighted values arise through :func:`depth_space`.
    """
    return eval_depth(z, freeze_cloud(data, spec, prior=prior))


def _pooled_within_scatter(sample: LabeledSample) -> np.ndarray:
    """Pooled within-class moment scatter (each class centered at its mean)."""
    x = sample.data.values
    acc = np.zeros((sample.d, sample.d))
    for j in range(1, sample.q + 1):
        rows = sample.class_rows(j)
        dev = rows - rows.mean(axis=0)
        acc += dev.T @ dev
    return acc / (sample.n - sample.q)


def depth_space(sample: LabeledSample, spec: DepthSpec, threads: int = 1) -> DepthSpace:
    """Depths of every training point with respect to every class.

    Per-class statistics are computed once and shared by all rows, so entry
    ``(i, j)`` equals a standalone :func:`depth` call against class ``j``'s
    cloud with the same spec. A training point is evaluated against its own
    class cloud with itself included. For ``potential`` the clouds are first
    standardized by the pooled within-class scatter and the priors are the
    class frequencies.
    """
    if threads < 1:
        raise ParameterError(f"`threads` must be >= 1, got {threads}")
    q = sample.q
    n = sample.n
    counts = sample.cardinalities

    pretransform = None
    if spec.notion == "potential":
        pretransform = inv_sqrt(_pooled_within_scatter(sample))

    stats = []
    for j in range(1, q + 1):
        stats.append(freeze_cloud(sample.class_rows(j), spec,
                                  prior=counts[j - 1] / n,
                                  pretransform=pretransform))

    depths = depth_rows(sample.data.values, stats, threads=threads)
    return DepthSpace(depths=depths, cardinalities=counts, spec=spec)


def depth_rows(queries, stats: "list[CloudStats] | tuple[CloudStats, ...]",
               threads: int = 1) -> np.ndarray:
    """Evaluate every query against every frozen class, one column per class.

    Row chunks may be spread over a thread pool; chunking never changes the
    numbers because each engine reduces per query row.
    """
    if threads < 1:
        raise ParameterError(f"`threads` must be >= 1, got {threads}")
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    n = queries.shape[0]
    q = len(stats)
    depths = np.empty((n, q))
    if threads == 1:
        for j in range(q):
            depths[:, j] = np.atleast_1d(eval_depth(queries, stats[j]))
    else:
        bounds = np.linspace(0, n, threads + 1, dtype=int)
        chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]

        def work(args):
            lo, hi = args
            return lo, hi, np.column_stack(
                [np.atleast_1d(eval_depth(queries[lo:hi], stats[j])) for j in range(q)]
            )

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for lo, hi, block in pool.map(work, chunks):
                depths[lo:hi] = block
    return depths
