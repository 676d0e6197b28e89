"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
from numpy.random import default_rng

from depthcraft.datamodel import GeneratorSpec, LabeledSample, generate_two_class


def gauss_cloud(n: int, d: int, seed: int, cov=None, mean=None) -> np.ndarray:
    rng = default_rng(seed)
    if cov is None:
        return rng.standard_normal((n, d)) + (0.0 if mean is None else np.asarray(mean))
    return rng.multivariate_normal(np.zeros(d) if mean is None else mean, cov, size=n)


def random_affine(d: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """A well-conditioned invertible matrix and a shift."""
    while True:
        a = rng.standard_normal((d, d))
        if np.linalg.cond(a) < 50:
            return a, rng.standard_normal(d)


def brute_min_error(feature, prop, labels) -> int:
    """Fewest errors of any origin line on the (feature, prop) plane.

    A line with normal angle ``g`` calls a point positive when
    ``f*cos(g) + x*sin(g) > 0``. Each point flips sides only when ``g``
    crosses one of its two breakpoint angles, so evaluating the error count
    at the midpoint of every breakpoint arc covers every labeling any line
    can produce. Points at the origin score zero under every line and are
    errors whenever their class is positive under either orientation; like
    the scanned rule, they are counted as errors outright.
    """
    f = np.asarray(feature, dtype=float)
    x = np.asarray(prop, dtype=float)
    y = np.asarray(labels, dtype=int)
    keep = ~((f == 0.0) & (x == 0.0))
    base = int(np.count_nonzero(~keep))
    f, x, y = f[keep], x[keep], y[keep]
    if f.size == 0:
        return base
    theta = np.arctan2(x, f)
    cuts = np.sort(np.mod(np.concatenate([theta + np.pi / 2.0,
                                          theta - np.pi / 2.0]), 2.0 * np.pi))
    mids = np.concatenate([(cuts[:-1] + cuts[1:]) / 2.0,
                           [(cuts[-1] + cuts[0] + 2.0 * np.pi) / 2.0]])
    scores = np.cos(mids)[:, None] * f[None, :] + np.sin(mids)[:, None] * x[None, :]
    wrong = np.where(scores > 0.0, (y < 0)[None, :], (y > 0)[None, :])
    return base + int(wrong.sum(axis=1).min())


@pytest.fixture
def separable_sample() -> LabeledSample:
    """Two well-separated Gaussian classes (40 + 40 points, 2-D)."""
    gen = GeneratorSpec(mu1=(0.0, 0.0), mu2=(4.0, 4.0))
    return generate_two_class(gen, 40, rng=default_rng(101))


@pytest.fixture
def overlap_sample() -> LabeledSample:
    """Two overlapping Gaussian classes (50 + 50 points, 2-D)."""
    gen = GeneratorSpec()
    return generate_two_class(gen, 50, rng=default_rng(55))
