"""Classification rules acting on depth-transformed data.

Five rules live here. The angle-search rule builds a separating direction in
a polynomial extension of the depth space one coordinate at a time. The
polynomial rule fits a smoothed boundary through the origin of a two-class
depth plot. The remaining three are k-nearest-neighbour voting in the depth
space, the plain maximum-depth rule, and a nearest-neighbour rule that ranks
training points by their depth in a cloud reflected around the query point
(the only rule here that never builds a depth plot).

Binary rules use signed labels: +1 for the first class of a pair, -1 for the
second. A score of exactly zero is resolved to the second class everywhere,
so repeated runs cannot disagree on boundary points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.special import expit

from ._optim import nelder_mead
from .datamodel import LabeledSample
from .depths.api import eval_depth, freeze_cloud
from .depths.spec import DepthSpec
from .errors import DegenerateDataError, ParameterError

__all__ = [
    "SeparatorSpec",
    "ExtendedDepthSpace",
    "AlphaModel",
    "PolynomialModel",
    "KnnDepthModel",
    "DknnModel",
    "stratified_folds",
    "extend",
    "get_min_error",
    "train_alpha",
    "train_alpha_cv",
    "classify_alpha",
    "train_polynomial",
    "classify_polynomial",
    "train_knn_depthspace",
    "classify_knn_depthspace",
    "classify_maxdepth",
    "train_dknn",
    "classify_dknn",
    "dknn_classify",
]

SEPARATOR_KINDS = ("alpha", "polynomial", "knn", "maxdepth", "dknn")


# ---------------------------------------------------------------------------
# configuration and shared helpers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparatorSpec:
    """Which separation rule to train, plus its tuning knobs.

    ``max_degree`` applies to the alpha and polynomial rules, ``knn_range``
    to the two nearest-neighbour rules; mixing them raises.
    """

    kind: str = "alpha"
    max_degree: int = 3
    knn_range: int | None = None
    cv_folds: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SEPARATOR_KINDS:
            raise ParameterError(
                f"`kind` must be one of {SEPARATOR_KINDS}, got {self.kind!r}")
        if self.max_degree not in (1, 2, 3):
            raise ParameterError(
                f"`max_degree` must be 1, 2 or 3, got {self.max_degree}")
        if self.knn_range is not None:
            if self.kind not in ("knn", "dknn"):
                raise ParameterError(
                    f"`knn_range` does not apply to kind {self.kind!r}")
            if self.knn_range < 1:
                raise ParameterError(
                    f"`knn_range` must be >= 1, got {self.knn_range}")
        if self.cv_folds < 2:
            raise ParameterError(f"`cv_folds` must be >= 2, got {self.cv_folds}")


def stratified_folds(labels, n_folds: int) -> np.ndarray:
    """Assign each row a fold index in ``0..n_folds-1``, round-robin per class.

    Rows of one class are walked in storage order and dealt out cyclically,
    so every fold sees close to the original class proportions and the
    assignment is deterministic.
    """
    labels = np.asarray(labels)
    if n_folds < 2:
        raise ParameterError(f"`n_folds` must be >= 2, got {n_folds}")
    assign = np.empty(labels.size, dtype=int)
    for value in np.unique(labels):
        rows = np.flatnonzero(labels == value)
        assign[rows] = np.arange(rows.size) % n_folds
    return assign


def _signed_labels(labels) -> np.ndarray:
    y = np.asarray(labels)
    if y.ndim != 1:
        raise ParameterError("`labels` must be one-dimensional")
    if not np.all(np.isin(y, (-1, 1))):
        raise ParameterError("`labels` must contain only -1 and +1")
    return y.astype(int)


# ---------------------------------------------------------------------------
# polynomial extension of the depth space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtendedDepthSpace:
    """All monomials of the depth columns up to a total degree.

    ``exponents[j]`` gives the per-column powers of feature ``j``; the
    constant monomial is excluded, so for ``q`` depth columns and degree
    ``p`` there are C(p+q, q) - 1 features. Columns are ordered by total
    degree and, within a degree, by the exponent of earlier depth columns
    first (x, y, x^2, xy, y^2, ... for two columns).
    """

    degree: int
    features: np.ndarray
    exponents: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return len(self.exponents)


def extend(depths, degree: int) -> ExtendedDepthSpace:
    """Expand an ``n x q`` depth matrix into its monomial features."""
    if degree not in (1, 2, 3):
        raise ParameterError(f"`degree` must be 1, 2 or 3, got {degree}")
    d = np.asarray(depths, dtype=float)
    if d.ndim != 2 or d.shape[1] < 1:
        raise ParameterError("`depths` must be a 2-D matrix with >= 1 column")
    q = d.shape[1]

    exponents: list[tuple[int, ...]] = []
    columns: list[np.ndarray] = []
    for total in range(1, degree + 1):
        for combo in combinations_with_replacement(range(q), total):
            expo = [0] * q
            for var in combo:
                expo[var] += 1
            col = np.ones(d.shape[0])
            for var, e in enumerate(expo):
                if e:
                    col = col * d[:, var] ** e
            exponents.append(tuple(expo))
            columns.append(col)
    return ExtendedDepthSpace(degree=degree,
                              features=np.column_stack(columns),
                              exponents=tuple(exponents))


# ---------------------------------------------------------------------------
# minimal-error direction in a feature/property plane
# ---------------------------------------------------------------------------


def get_min_error(feature, prop, labels) -> tuple[int, float]:
    """Best line through the origin of the (feature, property) plane.

    Points are classified by the sign of ``f*cos(a) + x*sin(a)``; this scans
    every combinatorially distinct line (splits of the points sorted by
    direction angle, both orientations) and counts actual misclassifications.
    Points sitting exactly at the origin can never land on a side, so their
    labels are dropped and they count as errors under every line.

    Returns ``(error_count, angle)``; the angle is the normal direction of
    the winning line, taken halfway between the two point directions it
    separates.
    """
    f = np.asarray(feature, dtype=float)
    x = np.asarray(prop, dtype=float)
    y = _signed_labels(labels)
    if f.shape != x.shape or f.shape != y.shape or f.ndim != 1:
        raise ParameterError("`feature`, `prop` and `labels` must be equal-length vectors")

    at_origin = (f == 0.0) & (x == 0.0)
    base = int(np.count_nonzero(at_origin))
    f, x, y = f[~at_origin], x[~at_origin], y[~at_origin]
    if f.size == 0:
        return base, 0.0

    # Fold directions onto a half circle: a line is determined by its angle
    # modulo pi, and the two orientations are handled explicitly below.
    phi = np.mod(np.arctan2(x, f), np.pi)
    u = np.unique(phi)
    if u.size == 1:
        cuts = np.array([u[0] + np.pi / 2.0])
    else:
        cuts = np.concatenate([(u[:-1] + u[1:]) / 2.0,
                               [(u[-1] + u[0] + np.pi) / 2.0]])
    gam = np.concatenate([cuts, cuts + np.pi]) - np.pi / 2.0

    scores = np.cos(gam)[:, None] * f[None, :] + np.sin(gam)[:, None] * x[None, :]
    wrong = np.where(scores > 0.0, (y < 0)[None, :], (y > 0)[None, :])
    errs = wrong.sum(axis=1)
    best = int(np.argmin(errs))
    angle = float(np.arctan2(np.sin(gam[best]), np.cos(gam[best])))
    return base + int(errs[best]), angle


# ---------------------------------------------------------------------------
# iterative angle-search rule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaModel:
    """A separating direction in the extended depth space.

    ``normal`` has one entry per extended feature and zeros at features the
    search never picked. ``chosen`` records the picked features in order as
    ``(feature index, angle)``; ``risk_trace`` holds the training error
    after each step and decreases strictly after the first entry.
    """

    normal: np.ndarray
    chosen: tuple[tuple[int, float], ...]
    risk_trace: tuple[int, ...]
    degree: int
    exponents: tuple[tuple[int, ...], ...]


def _count_sign_errors(scores: np.ndarray, y: np.ndarray) -> int:
    return int(np.count_nonzero(np.where(scores > 0.0, y < 0, y > 0)))


def train_alpha(extended: ExtendedDepthSpace, labels) -> AlphaModel:
    """Grow a separating direction one extended feature at a time.

    The first step scans all feature pairs (skipping pairs whose exponent
    vectors touch the same set of depth columns, which line up along a curve
    instead of filling the plane) and keeps the pair whose best line through
    the origin misclassifies the fewest points. Each later step folds the
    current scores together with one unused feature the same way, keeping
    the feature that lowers the error most, and stops as soon as no strict
    improvement is possible. The final direction is unrolled from the
    per-step angles, then flipped if the mirrored orientation scores better.
    """
    y = _signed_labels(labels)
    z = extended.features
    n, r = z.shape
    if y.size != n:
        raise ParameterError("`labels` length must match the feature matrix")
    if n < 2:
        raise DegenerateDataError("training needs at least 2 points")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise DegenerateDataError("training needs both classes present")

    degs = [sum(e) for e in extended.exponents]
    touched = [tuple(v > 0 for v in e) for e in extended.exponents]
    pairs = [(k, l) for k in range(r) for l in range(k + 1, r)
             if touched[k] != touched[l]]
    pairs.sort(key=lambda kl: (degs[kl[0]] + degs[kl[1]], kl[0], kl[1]))
    if not pairs:
        raise DegenerateDataError("no usable feature pair to start from")

    best_err, best_angle, best_pair = None, 0.0, pairs[0]
    for k, l in pairs:
        err, angle = get_min_error(z[:, k], z[:, l], y)
        if best_err is None or err < best_err:
            best_err, best_angle, best_pair = err, angle, (k, l)
            if err == 0:
                break

    # The first feature's stored angle is exactly pi/2: the backward unroll
    # below then assigns it the bare product of all later cosines, which is
    # its true weight in the nested fold.
    k, l = best_pair
    chosen = [(k, math.pi / 2.0), (l, best_angle)]
    trace = [best_err]
    scores = z[:, k] * math.cos(best_angle) + z[:, l] * math.sin(best_angle)
    remaining = sorted((p for p in range(r) if p not in (k, l)),
                       key=lambda p: (degs[p], p))

    while trace[-1] > 0 and remaining:
        step_err, step_angle, step_prop = None, 0.0, -1
        for p in remaining:
            err, angle = get_min_error(scores, z[:, p], y)
            if step_err is None or err < step_err:
                step_err, step_angle, step_prop = err, angle, p
                if err == 0:
                    break
        if step_err >= trace[-1]:
            break
        scores = scores * math.cos(step_angle) + z[:, step_prop] * math.sin(step_angle)
        chosen.append((step_prop, step_angle))
        trace.append(step_err)
        remaining.remove(step_prop)

    # Unroll the angles into one direction vector: the feature added last
    # keeps its sine weight, every earlier weight picks up the cosines of
    # all later steps.
    normal = np.zeros(r)
    carry = 1.0
    for p, angle in reversed(chosen):
        normal[p] = carry * math.sin(angle)
        carry *= math.cos(angle)

    flipped = _count_sign_errors(-(z @ normal), y)
    if flipped < _count_sign_errors(z @ normal, y):
        normal = -normal

    return AlphaModel(normal=normal, chosen=tuple(chosen), risk_trace=tuple(trace),
                      degree=extended.degree, exponents=extended.exponents)


def classify_alpha(model: AlphaModel, points):
    """Signed score of extended points; positive means the +1 class."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != model.normal.size:
        raise ParameterError(
            f"points have {pts.shape[-1]} features, model expects {model.normal.size}")
    scores = np.einsum("...r,r->...", pts, model.normal)
    return float(scores) if pts.ndim == 1 else scores


def train_alpha_cv(depths, labels, max_degree: int = 3,
                   cv_folds: int = 10) -> tuple[AlphaModel, tuple[int, ...]]:
    """Pick the extension degree by stratified cross-validation, then train.

    Returns the model fit on all rows at the winning degree together with
    the per-degree validation error counts. Ties go to the lower degree.
    """
    d = np.asarray(depths, dtype=float)
    y = _signed_labels(labels)
    folds = stratified_folds(y, cv_folds)

    cv_errors = []
    extensions = []
    for degree in range(1, max_degree + 1):
        ext = extend(d, degree)
        extensions.append(ext)
        total = 0
        for fold in range(cv_folds):
            va = folds == fold
            tr = ~va
            if not np.any(va):
                continue
            if not (np.any(y[tr] > 0) and np.any(y[tr] < 0)):
                continue
            sub = ExtendedDepthSpace(degree=degree, features=ext.features[tr],
                                     exponents=ext.exponents)
            model = train_alpha(sub, y[tr])
            scores = classify_alpha(model, ext.features[va])
            total += _count_sign_errors(np.atleast_1d(scores), y[va])
        cv_errors.append(total)

    best = int(np.argmin(cv_errors))
    return train_alpha(extensions[best], y), tuple(cv_errors)


# ---------------------------------------------------------------------------
# smoothed polynomial boundary on a two-class depth plot
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialModel:
    """A polynomial through the origin separating a two-column depth plot.

    With ``swapped`` unset the boundary is ``second = poly(first)`` and a
    point scores ``poly(first) - second``; swapped models exchange the two
    columns first. Positive scores mean the +1 class.
    """

    coefficients: np.ndarray
    degree: int
    swapped: bool
    cv_error: int


def _polyval_origin(coefficients, t):
    acc = np.zeros_like(np.asarray(t, dtype=float))
    for c in reversed(tuple(coefficients)):
        acc = (acc + c) * t
    return acc


def _fit_polynomial(u, v, y, degree, rng, restarts, smoothing):
    gap = np.abs(u - v)
    s = smoothing * float(np.median(gap))
    if s <= 0.0:
        s = 1e-12

    def loss(a):
        margin = _polyval_origin(a, u) - v
        return float(np.sum(expit(-(y * margin) / s)))

    best_a, best_f = None, np.inf
    for _ in range(restarts):
        a0 = rng.standard_normal(degree)
        a, f = nelder_mead(loss, a0, max_iter=400)
        if f < best_f:
            best_a, best_f = a, f
    return best_a


def train_polynomial(ddplot, labels, max_degree: int = 3, cv_folds: int = 10,
                     seed: int = 0, restarts: int = 10,
                     smoothing: float = 0.1) -> PolynomialModel:
    """Fit polynomial boundaries and keep the best degree and orientation.

    Every degree up to ``max_degree`` is fit in both plot orientations by
    minimizing a logistic relaxation of the error count (scale = ``smoothing``
    times the median gap between the two depth columns) with a simplex
    search from ``restarts`` random starts. The winner is the combination
    with the lowest stratified cross-validation error; ties prefer the
    lower degree, then the unswapped orientation.
    """
    dd = np.asarray(ddplot, dtype=float)
    if dd.ndim != 2 or dd.shape[1] != 2:
        raise ParameterError("`ddplot` must have exactly 2 depth columns")
    y = _signed_labels(labels)
    if y.size != dd.shape[0]:
        raise ParameterError("`labels` length must match `ddplot`")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise DegenerateDataError("training needs both classes present")
    if restarts < 1:
        raise ParameterError(f"`restarts` must be >= 1, got {restarts}")
    if smoothing <= 0:
        raise ParameterError(f"`smoothing` must be > 0, got {smoothing}")

    rng = np.random.default_rng(seed)
    folds = stratified_folds(y, cv_folds)

    ranked = []
    for degree in range(1, max_degree + 1):
        for swapped in (False, True):
            u = dd[:, 1] if swapped else dd[:, 0]
            v = dd[:, 0] if swapped else dd[:, 1]
            total = 0
            for fold in range(cv_folds):
                va = folds == fold
                tr = ~va
                if not np.any(va):
                    continue
                if not (np.any(y[tr] > 0) and np.any(y[tr] < 0)):
                    continue
                a = _fit_polynomial(u[tr], v[tr], y[tr], degree, rng,
                                    restarts, smoothing)
                margin = _polyval_origin(a, u[va]) - v[va]
                total += _count_sign_errors(margin, y[va])
            ranked.append((total, degree, swapped))

    cv_error, degree, swapped = min(ranked, key=lambda t: (t[0], t[1], t[2]))
    u = dd[:, 1] if swapped else dd[:, 0]
    v = dd[:, 0] if swapped else dd[:, 1]
    coefficients = _fit_polynomial(u, v, y, degree, rng, restarts, smoothing)
    return PolynomialModel(coefficients=coefficients, degree=degree,
                           swapped=swapped, cv_error=int(cv_error))


def classify_polynomial(model: PolynomialModel, rows):
    """Signed score of depth-plot rows; positive means the +1 class."""
    dd = np.asarray(rows, dtype=float)
    if dd.shape[-1] != 2:
        raise ParameterError("rows must have exactly 2 depth columns")
    u = dd[..., 1] if model.swapped else dd[..., 0]
    v = dd[..., 0] if model.swapped else dd[..., 1]
    scores = _polyval_origin(model.coefficients, u) - v
    return float(scores) if dd.ndim == 1 else scores


# ---------------------------------------------------------------------------
# k-nearest-neighbour voting in the depth space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KnnDepthModel:
    """Neighbour voting over stored depth rows with a tuned ``k``."""

    points: np.ndarray
    labels: np.ndarray
    k: int
    class_labels: tuple[int, ...]
    class_counts: tuple[int, ...]
    loo_trace: tuple[int, ...]


def _vote(ordered_labels, class_labels, class_counts):
    values, counts = np.unique(ordered_labels, return_counts=True)
    top = values[counts == counts.max()]
    if top.size == 1:
        return int(top[0])
    # Tie: prefer the class with more training points, then the smaller label.
    sizes = [class_counts[class_labels.index(int(v))] for v in top]
    big = max(sizes)
    return int(min(v for v, s in zip(top, sizes) if s == big))


def train_knn_depthspace(depths, labels, k_max: int | None = None) -> KnnDepthModel:
    """Tune ``k`` by leave-one-out error over ``1..k_max`` (ties: smaller k).

    Distances are plain Euclidean in the depth space; equal distances are
    resolved toward the earlier training row. Vote ties go to the larger
    training class, then to the smaller label, so the rule works unchanged
    with any number of classes.
    """
    d = np.asarray(depths, dtype=float)
    if d.ndim != 2:
        raise ParameterError("`depths` must be a 2-D matrix")
    n = d.shape[0]
    y = np.asarray(labels).astype(int)
    if y.shape != (n,):
        raise ParameterError("`labels` length must match `depths`")
    if n < 2:
        raise DegenerateDataError("training needs at least 2 points")
    if k_max is None:
        k_max = min(50, math.ceil(n / 2), n - 1)
    if not 1 <= k_max <= n - 1:
        raise ParameterError(f"`k_max` must be in [1, {n - 1}], got {k_max}")

    class_labels = tuple(int(v) for v in np.unique(y))
    class_counts = tuple(int(np.count_nonzero(y == v)) for v in class_labels)

    gaps = d[:, None, :] - d[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", gaps, gaps))
    np.fill_diagonal(dist, np.inf)
    order = np.argsort(dist, axis=1, kind="stable")

    errors = np.zeros(k_max + 1, dtype=int)
    for i in range(n):
        neigh = y[order[i]]
        for k in range(1, k_max + 1):
            if _vote(neigh[:k], class_labels, class_counts) != y[i]:
                errors[k] += 1
    k_best = int(np.argmin(errors[1:])) + 1

    return KnnDepthModel(points=d, labels=y, k=k_best,
                         class_labels=class_labels, class_counts=class_counts,
                         loo_trace=tuple(int(e) for e in errors[1:]))


def classify_knn_depthspace(model: KnnDepthModel, rows):
    """Class labels of depth rows by majority vote among the k nearest."""
    pts = np.asarray(rows, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.points.shape[1]:
        raise ParameterError(
            f"rows have {pts.shape[1]} columns, model expects {model.points.shape[1]}")
    gaps = pts[:, None, :] - model.points[None, :, :]
    dist = np.sqrt(np.einsum("mjk,mjk->mj", gaps, gaps))
    order = np.argsort(dist, axis=1, kind="stable")
    out = np.array([_vote(model.labels[order[m, :model.k]],
                          model.class_labels, model.class_counts)
                    for m in range(pts.shape[0])])
    return int(out[0]) if single else out


# ---------------------------------------------------------------------------
# maximum-depth rule
# ---------------------------------------------------------------------------


def classify_maxdepth(depth_row, rng) -> int:
    """1-based index of the deepest class, breaking exact ties at random."""
    row = np.asarray(depth_row, dtype=float)
    if row.ndim != 1 or row.size < 2:
        raise ParameterError("`depth_row` must be a vector with >= 2 entries")
    top = np.flatnonzero(row == row.max())
    if top.size == 1:
        return int(top[0]) + 1
    return int(top[rng.integers(top.size)]) + 1


# ---------------------------------------------------------------------------
# nearest neighbours ranked by depth in a reflected cloud
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DknnModel:
    """Reflection-based neighbour rule with a tuned ``k``."""

    points: np.ndarray
    labels: np.ndarray
    k: int
    depth_spec: DepthSpec
    loo_trace: tuple[int, ...]


def _reflected_depth_order(x0: np.ndarray, data: np.ndarray,
                           spec: DepthSpec) -> np.ndarray:
    """Training rows ordered deepest-first in ``data + (2*x0 - data)``.

    Reflecting the cloud around the query makes it centrally symmetric with
    the query at its center, so the deepest original rows are the ones the
    query sits between. Equal depths fall back to row order.
    """
    extended = np.vstack([data, 2.0 * x0 - data])
    dep = np.atleast_1d(eval_depth(data, freeze_cloud(extended, spec)))
    return np.argsort(-dep, kind="stable")


def _modal_label(top_labels: np.ndarray, rng) -> int:
    values, counts = np.unique(top_labels, return_counts=True)
    ties = values[counts == counts.max()]
    if ties.size == 1:
        return int(ties[0])
    return int(ties[rng.integers(ties.size)])


def dknn_classify(x0, sample: LabeledSample, k: int, spec: DepthSpec,
                  rng=None) -> int:
    """Classify one point by voting among the k deepest training rows."""
    data = sample.data.values
    if not 1 <= k <= data.shape[0]:
        raise ParameterError(f"`k` must be in [1, {data.shape[0]}], got {k}")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    order = _reflected_depth_order(np.asarray(x0, dtype=float), data, spec)
    return _modal_label(sample.labels[order[:k]], rng)


def train_dknn(sample: LabeledSample, spec: DepthSpec, k_max: int | None = None,
               seed: int = 0) -> DknnModel:
    """Tune ``k`` by leave-one-out error (ties: smaller k).

    Every left-out point is classified against the remaining rows with the
    full reflection machinery, so the tuned error is exactly the deployment
    rule's error on unseen points drawn from the training set.
    """
    data = sample.data.values
    y = sample.labels
    n = data.shape[0]
    if n < 2:
        raise DegenerateDataError("training needs at least 2 points")
    if k_max is None:
        k_max = min(50, math.ceil(n / 2), n - 1)
    if not 1 <= k_max <= n - 1:
        raise ParameterError(f"`k_max` must be in [1, {n - 1}], got {k_max}")

    rng = np.random.default_rng(seed)
    errors = np.zeros(k_max + 1, dtype=int)
    for i in range(n):
        rest = np.delete(data, i, axis=0)
        rest_y = np.delete(y, i)
        order = _reflected_depth_order(data[i], rest, spec)
        neigh = rest_y[order]
        for k in range(1, k_max + 1):
            if _modal_label(neigh[:k], rng) != y[i]:
                errors[k] += 1
    k_best = int(np.argmin(errors[1:])) + 1

    return DknnModel(points=data.copy(), labels=y.copy(), k=k_best,
                     depth_spec=spec, loo_trace=tuple(int(e) for e in errors[1:]))


def classify_dknn(model: DknnModel, rows, rng=None):
    """Class labels of raw data rows under a trained reflection rule."""
    pts = np.asarray(rows, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.points.shape[1]:
        raise ParameterError(
            f"rows have {pts.shape[1]} columns, model expects {model.points.shape[1]}")
    if rng is None:
        rng = np.random.default_rng(model.depth_spec.seed)
    out = np.array([
        _modal_label(model.labels[
            _reflected_depth_order(p, model.points, model.depth_spec)[:model.k]], rng)
        for p in pts
    ])
    return int(out[0]) if single else out
