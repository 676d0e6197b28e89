"""Fallback rules for points that no depth-based rule can place.

A query with zero depth in every class carries no depth information, so the
main classifier hands it to one of the cheap treatments here: Gaussian
discriminants, nearest neighbours (plain or affine-invariant), the
Mahalanobis maximum-depth rule, random assignment, or an explicit refusal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .datamodel import LabeledSample
from .depths.api import eval_depth, freeze_cloud
from .depths.mahalanobis import depth_mahalanobis
from .depths.spec import DepthSpec
from .depths.zonoid import in_convex_hull
from .errors import DegenerateDataError, ParameterError
from .estimators import inv_sqrt, scatter_estimate
from .separators import classify_knn_depthspace, classify_maxdepth, train_knn_depthspace

__all__ = [
    "OutsiderPolicy",
    "TreatmentModel",
    "IGNORED",
    "detect_outsiders",
    "train_treatment",
    "classify_treatment",
]

TREATMENT_METHODS = ("lda", "qda", "knn", "knn-affine", "maxdepth-mahalanobis",
                     "rand-equal", "rand-prop", "ignore")

#: The answer returned for every point by the ``ignore`` treatment.
IGNORED = "Ignored"

_ZERO_DEPTH_TOL = 1e-12


# ---------------------------------------------------------------------------
# policy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OutsiderPolicy:
    """A named treatment choice with its method-specific knobs.

    ``k_max`` only applies to the neighbour methods, ``estimator`` and
    ``mcd_fraction`` only to ``maxdepth-mahalanobis``; setting either for
    any other method raises.
    """

    name: str = "default"
    method: str = "lda"
    k_max: int | None = None
    estimator: str = "moment"
    mcd_fraction: float = 0.75
    seed: int = 0

    def __post_init__(self):
        if self.method not in TREATMENT_METHODS:
            raise ParameterError(
                f"`method` must be one of {TREATMENT_METHODS}, got {self.method!r}")
        if self.k_max is not None:
            if self.method not in ("knn", "knn-affine"):
                raise ParameterError(
                    f"`k_max` does not apply to method {self.method!r}")
            if self.k_max < 1:
                raise ParameterError(f"`k_max` must be >= 1, got {self.k_max}")
        if self.estimator not in ("moment", "mcd"):
            raise ParameterError(
                f"`estimator` must be 'moment' or 'mcd', got {self.estimator!r}")
        if self.estimator != "moment" and self.method != "maxdepth-mahalanobis":
            raise ParameterError(
                f"`estimator` does not apply to method {self.method!r}")


# ---------------------------------------------------------------------------
# detection
# ---------------------------------------------------------------------------


def detect_outsiders(points, class_clouds, mode: str = "convex-hull",
                     spec: DepthSpec | None = None) -> np.ndarray:
    """Flag points that fall outside every class.

    In ``convex-hull`` mode a point is an outsider when the hull-membership
    program is infeasible for each class cloud; this is the reference answer
    for the depth notions that vanish outside the hull. ``zero-depth`` mode
    instead computes the depths under ``spec`` and flags points whose depth
    stays below 1e-12 in every class, which can disagree with the hull for
    approximated notions.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    clouds = [np.asarray(c, dtype=float) for c in class_clouds]
    if not clouds:
        raise ParameterError("`class_clouds` must not be empty")

    if mode == "convex-hull":
        flags = np.ones(pts.shape[0], dtype=bool)
        for cloud in clouds:
            for i in range(pts.shape[0]):
                if flags[i] and in_convex_hull(pts[i], cloud):
                    flags[i] = False
        return flags
    if mode == "zero-depth":
        if spec is None:
            raise ParameterError("zero-depth mode needs a `spec`")
        flags = np.ones(pts.shape[0], dtype=bool)
        for cloud in clouds:
            dep = np.atleast_1d(eval_depth(pts, freeze_cloud(cloud, spec)))
            flags &= dep < _ZERO_DEPTH_TOL
        return flags
    raise ParameterError(
        f"`mode` must be 'convex-hull' or 'zero-depth', got {mode!r}")


# ---------------------------------------------------------------------------
# treatment training
# ---------------------------------------------------------------------------


def _inverted_covariance(cov: np.ndarray, what: str):
    """Eigendecomposition-based inverse plus log-determinant.

    Raises when the smallest eigenvalue is numerically zero, naming the
    offending covariance so the caller can tell which class is degenerate.
    """
    lam, vec = np.linalg.eigh(cov)
    if lam[0] <= 1e-12 * max(lam[-1], 1.0):
        raise DegenerateDataError(f"{what} covariance is singular")
    inv = (vec / lam) @ vec.T
    return inv, float(np.sum(np.log(lam)))


@dataclass(frozen=True)
class TreatmentModel:
    """A trained outsider treatment; produced by :func:`train_treatment`."""

    policy: OutsiderPolicy
    q: int
    cardinalities: tuple[int, ...]
    state: dict = field(repr=False)


def train_treatment(policy: OutsiderPolicy, sample: LabeledSample) -> TreatmentModel:
    """Fit the treatment named by ``policy`` on the full training sample."""
    x = sample.data.values
    y = sample.labels
    n, d = x.shape
    q = sample.q
    counts = sample.cardinalities
    method = policy.method
    state: dict = {}

    if method in ("lda", "qda"):
        means = np.vstack([x[y == j].mean(axis=0) for j in range(1, q + 1)])
        priors = np.array(counts, dtype=float) / n
        if method == "lda":
            if n <= q:
                raise DegenerateDataError("pooled covariance needs more points than classes")
            pooled = np.zeros((d, d))
            for j in range(1, q + 1):
                dev = x[y == j] - means[j - 1]
                pooled += dev.T @ dev
            pooled /= n - q
            inv, _ = _inverted_covariance(pooled, "pooled")
            # Linear scores: z . w_j + b_j with w_j = inv * mu_j.
            w = means @ inv
            b = -0.5 * np.einsum("jd,jd->j", w, means) + np.log(priors)
            state.update(w=w, b=b)
        else:
            inv_list, logdet = [], []
            for j in range(1, q + 1):
                rows = x[y == j]
                if rows.shape[0] < 2:
                    raise DegenerateDataError(
                        f"class {j} needs >= 2 points for a covariance")
                cov = np.cov(rows, rowvar=False, ddof=1).reshape(d, d)
                inv, ld = _inverted_covariance(cov, f"class {j}")
                inv_list.append(inv)
                logdet.append(ld)
            state.update(means=means, invs=tuple(inv_list),
                         logdets=tuple(logdet), log_priors=np.log(priors))

    elif method == "knn":
        state["model"] = train_knn_depthspace(x, y, k_max=policy.k_max)

    elif method == "knn-affine":
        if n <= q:
            raise DegenerateDataError("pooled covariance needs more points than classes")
        pooled = np.zeros((d, d))
        for j in range(1, q + 1):
            dev = x[y == j] - x[y == j].mean(axis=0)
            pooled += dev.T @ dev
        pooled /= n - q
        try:
            whiten = inv_sqrt(pooled)
        except DegenerateDataError:
            raise DegenerateDataError("pooled covariance is singular") from None
        xw = x @ whiten.T
        pair_fits = []
        for a, b in combinations(range(1, q + 1), 2):
            rows = np.flatnonzero((y == a) | (y == b))
            pair_fits.append((a, b, _fit_binary_knn(xw[rows], y[rows],
                                                    policy.k_max)))
        state.update(whiten=whiten, pairs=tuple(pair_fits))

    elif method == "maxdepth-mahalanobis":
        rng = np.random.default_rng(policy.seed)
        estimates = []
        for j in range(1, q + 1):
            estimates.append((x[y == j],
                              scatter_estimate(x[y == j], kind=policy.estimator,
                                               fraction=policy.mcd_fraction,
                                               rng=rng)))
        state["per_class"] = tuple(estimates)

    elif method in ("rand-equal", "rand-prop", "ignore"):
        pass

    return TreatmentModel(policy=policy, q=q, cardinalities=counts, state=state)


def _fit_binary_knn(points: np.ndarray, labels: np.ndarray, k_max: int | None):
    """Tune k by leave-one-out error with bare argmax voting (no tie care)."""
    n = points.shape[0]
    if n < 2:
        raise DegenerateDataError("knn needs at least 2 points")
    if k_max is None:
        k_max = min(50, math.ceil(n / 2), n - 1)
    if not 1 <= k_max <= n - 1:
        raise ParameterError(f"`k_max` must be in [1, {n - 1}], got {k_max}")
    gaps = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", gaps, gaps))
    np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")
    errors = np.zeros(k_max + 1, dtype=int)
    for i in range(n):
        neigh = labels[order[i]]
        for k in range(1, k_max + 1):
            if np.argmax(np.bincount(neigh[:k])) != labels[i]:
                errors[k] += 1
    k_best = int(np.argmin(errors[1:])) + 1
    return points, labels, k_best


def _binary_knn_predict(fit, queries: np.ndarray) -> np.ndarray:
    points, labels, k = fit
    gaps = queries[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.einsum("mjk,mjk->mj", gaps, gaps))
    order = np.argsort(dist, axis=1, kind="stable")
    return np.array([int(np.argmax(np.bincount(labels[order[m, :k]])))
                     for m in range(queries.shape[0])])


# ---------------------------------------------------------------------------
# treatment application
# ---------------------------------------------------------------------------


def classify_treatment(model: TreatmentModel, points, rng=None) -> list:
    """Assign each point a 1-based class label, or ``IGNORED``.

    ``rng`` drives the random methods and max-depth tie-breaks; when omitted
    a fresh generator seeded from the policy is used, so repeated calls see
    the same draws.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = pts.shape[0]
    q = model.q
    method = model.policy.method
    if rng is None:
        rng = np.random.default_rng(model.policy.seed)
    state = model.state

    if method == "lda":
        scores = pts @ state["w"].T + state["b"]
        return [int(v) + 1 for v in np.argmax(scores, axis=1)]

    if method == "qda":
        scores = np.empty((m, q))
        for j in range(q):
            diff = pts - state["means"][j]
            maha = np.einsum("md,de,me->m", diff, state["invs"][j], diff)
            scores[:, j] = -0.5 * state["logdets"][j] - 0.5 * maha + state["log_priors"][j]
        return [int(v) + 1 for v in np.argmax(scores, axis=1)]

    if method == "knn":
        out = classify_knn_depthspace(state["model"], pts)
        return [int(v) for v in np.atleast_1d(out)]

    if method == "knn-affine":
        ptsw = pts @ state["whiten"].T
        votes = np.zeros((m, q + 1), dtype=int)
        for a, b, fit in state["pairs"]:
            pred = _binary_knn_predict(fit, ptsw)
            for i, v in enumerate(pred):
                votes[i, v] += 1
        out = []
        for i in range(m):
            best = votes[i].max()
            tied = np.flatnonzero(votes[i] == best)
            if tied.size > 1:
                sizes = [model.cardinalities[j - 1] for j in tied]
                tied = tied[np.asarray(sizes) == max(sizes)]
            out.append(int(tied[0]))
        return out

    if method == "maxdepth-mahalanobis":
        rows = np.empty((m, q))
        for j, (cloud, est) in enumerate(state["per_class"]):
            rows[:, j] = np.atleast_1d(depth_mahalanobis(pts, cloud, est))
        return [classify_maxdepth(rows[i], rng) for i in range(m)]

    if method == "rand-equal":
        return [int(v) + 1 for v in rng.integers(q, size=m)]

    if method == "rand-prop":
        probs = np.array(model.cardinalities, dtype=float) / sum(model.cardinalities)
        return [int(v) + 1 for v in rng.choice(q, size=m, p=probs)]

    return [IGNORED] * m
