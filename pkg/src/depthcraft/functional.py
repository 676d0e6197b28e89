"""Classification of functions via finite-dimensional integral features.

Each observed function (irregular time grid, values) is turned into a fixed
vector: integrals of its piecewise-linear interpolant over ``L`` equal
subintervals of the common time range, followed by integrals of its slope
over ``S`` equal subintervals. The pair ``(L, S)`` is picked by
cross-validation, either over every candidate or over a short list ranked
by a combinatorial generalization bound, and a multivariate classifier is
trained on the winning transform.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .classifier import (FORMAT_VERSION, TrainedModel, _read_versioned,
                         _treatment_from_json, _treatment_json, classify,
                         model_from_doc, model_to_doc, train)
from .datamodel import DataMatrix, LabeledSample
from .depths.spec import DepthSpec
from .errors import FormatError, ParameterError
from .outsiders import OutsiderPolicy, TreatmentModel, classify_treatment, train_treatment
from .separators import SeparatorSpec, stratified_folds

__all__ = [
    "FunctionalSample",
    "LSSpec",
    "FunctionalModel",
    "ls_transform",
    "vc_bound",
    "train_functional",
    "classify_functional",
    "load_functional",
    "save_functional",
    "save_functional_model",
    "load_functional_model",
]

FUNCTIONAL_CLASSIFIERS = ("ddalpha", "maxdepth", "knn-affine", "lda", "qda")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


class FunctionalSample:
    """Functions observed at ordered time points, with optional labels.

    Each observation is a pair ``(args, vals)`` of equal-length vectors with
    strictly increasing, finite ``args``. Construction shifts all time
    vectors so the earliest observed time is 0 and records ``T``, the latest
    shifted time; the transform integrates over ``[0, T]``. Labels, when
    given, are remapped to contiguous integers ``1..q`` with the original
    values kept in ``label_names``.
    """

    __slots__ = ("_observations", "_labels", "_label_names", "_T")

    def __init__(self, observations, labels=None) -> None:
        cleaned = []
        for i, (args, vals) in enumerate(observations):
            a = np.asarray(args, dtype=float)
            v = np.asarray(vals, dtype=float)
            if a.ndim != 1 or v.ndim != 1 or a.size != v.size:
                raise ParameterError(
                    f"observation {i}: `args` and `vals` must be equal-length vectors")
            if a.size < 2:
                raise ParameterError(f"observation {i}: needs at least 2 points")
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
                raise ParameterError(f"observation {i}: values must be finite")
            if np.any(np.diff(a) <= 0):
                raise ParameterError(f"observation {i}: `args` must be strictly increasing")
            cleaned.append((a, v))

        if cleaned:
            shift = min(a[0] for a, _ in cleaned)
            cleaned = [(a - shift, v) for a, v in cleaned]
            t_max = max(a[-1] for a, _ in cleaned)
        else:
            t_max = 0.0

        mapped = None
        names: tuple = ()
        if labels is not None:
            raw = list(labels)
            if len(raw) != len(cleaned):
                raise ParameterError("`labels` length must match the observations")
            ordered = sorted(set(raw), key=lambda v: (str(type(v)), v))
            lookup = {value: j + 1 for j, value in enumerate(ordered)}
            names = tuple(str(v) for v in ordered)
            if len(names) < 1:
                raise ParameterError("`labels` must not be empty")
            mapped = np.asarray([lookup[v] for v in raw], dtype=int)

        object.__setattr__(self, "_observations", tuple(cleaned))
        object.__setattr__(self, "_labels", mapped)
        object.__setattr__(self, "_label_names", names)
        object.__setattr__(self, "_T", float(t_max))

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("FunctionalSample is immutable")

    @property
    def observations(self) -> tuple:
        return self._observations

    @property
    def labels(self):
        return self._labels

    @property
    def label_names(self) -> tuple:
        return self._label_names

    @property
    def T(self) -> float:
        return self._T

    @property
    def n(self) -> int:
        return len(self._observations)

    @property
    def q(self) -> int:
        return len(self._label_names)

    def __repr__(self) -> str:
        tag = "unlabeled" if self._labels is None else f"q={self.q}"
        return f"FunctionalSample(n={self.n}, T={self._T:g}, {tag})"


@dataclass(frozen=True)
class LSSpec:
    """How many location and slope features to extract.

    ``instance="average"`` integrates the interpolant (resp. its slope) over
    equal subintervals; ``"values"`` instead evaluates it at the subinterval
    midpoints.
    """

    L: int
    S: int
    instance: str = "average"

    def __post_init__(self):
        for name, value in (("L", self.L), ("S", self.S)):
            if not isinstance(value, (int, np.integer)):
                raise ParameterError(f"`{name}` must be an integer")
            object.__setattr__(self, name, int(value))
        if self.L < 0 or self.S < 0:
            raise ParameterError(f"`L` and `S` must be >= 0, got ({self.L}, {self.S})")
        if self.L + self.S < 2:
            raise ParameterError(f"`L` + `S` must be >= 2, got {self.L + self.S}")
        if self.instance not in ("average", "values"):
            raise ParameterError(
                f"`instance` must be 'average' or 'values', got {self.instance!r}")


# ---------------------------------------------------------------------------
# the transform
# ---------------------------------------------------------------------------


def _location_integrals(args, vals, edges) -> np.ndarray:
    """Exact integrals of the interpolant between consecutive edges.

    The merged grid of edges and interior knots keeps every trapezoid
    inside one linear piece, so the sums are exact up to rounding.
    np.interp clamps outside the knot range, which is precisely the
    constant-extension rule.
    """
    inner = args[(args > edges[0]) & (args < edges[-1])]
    grid = np.unique(np.concatenate([edges, inner]))
    fv = np.interp(grid, args, vals)
    pieces = (grid[1:] - grid[:-1]) * (fv[1:] + fv[:-1]) / 2.0
    starts = np.searchsorted(grid, edges[:-1])
    return np.add.reduceat(pieces, starts)


def _slope_at(args, vals, t) -> np.ndarray:
    """Piecewise-constant slope at query times, zero outside the knot range."""
    slopes = np.diff(vals) / np.diff(args)
    idx = np.clip(np.searchsorted(args, t, side="right") - 1, 0, slopes.size - 1)
    out = slopes[idx]
    return np.where((t < args[0]) | (t >= args[-1]), 0.0, out)


def ls_transform(sample: FunctionalSample, spec: LSSpec,
                 T: float | None = None) -> DataMatrix:
    """Map every function to ``L`` location features and ``S`` slope features.

    With ``instance="average"`` the location features are integrals of the
    piecewise-linear interpolant over ``L`` equal subintervals of
    ``[0, T]`` (functions extend constantly outside their own range), and
    the slope features are integrals of its derivative, i.e. differences of
    the interpolant at subinterval endpoints. ``instance="values"`` samples
    the interpolant (resp. slope) at subinterval midpoints instead. ``T``
    defaults to the sample's own range and is overridden at classification
    time with the training value; functions reaching past it lose the tail
    and a warning is issued.
    """
    horizon = sample.T if T is None else float(T)
    if horizon <= 0.0:
        raise ParameterError(f"the time range must be positive, got {horizon:g}")
    if any(a[-1] > horizon * (1.0 + 1e-12) for a, _ in sample.observations):
        warnings.warn("some functions extend past the training time range; "
                      "the part beyond it is not used", stacklevel=2)

    out = np.empty((sample.n, spec.L + spec.S))
    loc_edges = np.linspace(0.0, horizon, spec.L + 1)
    slo_edges = np.linspace(0.0, horizon, spec.S + 1)
    for i, (args, vals) in enumerate(sample.observations):
        if spec.instance == "average":
            if spec.L:
                out[i, :spec.L] = _location_integrals(args, vals, loc_edges)
            if spec.S:
                at = np.interp(slo_edges, args, vals)
                out[i, spec.L:] = at[1:] - at[:-1]
        else:
            if spec.L:
                mid = (loc_edges[:-1] + loc_edges[1:]) / 2.0
                out[i, :spec.L] = np.interp(mid, args, vals)
            if spec.S:
                mid = (slo_edges[:-1] + slo_edges[1:]) / 2.0
                out[i, spec.L:] = _slope_at(args, vals, mid)
    return DataMatrix(out)


# ---------------------------------------------------------------------------
# generalization bound used to shortlist (L, S) candidates
# ---------------------------------------------------------------------------


def _labeled_transform(sample: FunctionalSample, spec: LSSpec) -> LabeledSample:
    if sample.labels is None:
        raise ParameterError("the sample must be labeled")
    return LabeledSample(ls_transform(sample, spec), sample.labels,
                         label_names=sample.label_names)


def _lda_risk(ls: LabeledSample) -> float:
    """Training-error fraction of a linear rule on the transformed sample."""
    model = train_treatment(OutsiderPolicy(name="vc", method="lda"), ls)
    got = np.asarray(classify_treatment(model, ls.data.values))
    return float(np.mean(got != ls.labels))


def vc_bound(sample: FunctionalSample, spec: LSSpec,
             empirical_risk: float | None = None) -> float:
    """Generalization bound for a linear rule on the ``(L, S)`` transform.

    The empirical risk defaults to the training error of a linear
    discriminant on the transformed two-class sample; pass
    ``empirical_risk`` to study the penalty term alone. The penalty counts
    the linear rule's growth function exactly: ``sum_{k<L+S} C(n-1, k)``,
    clamped at ``2^(n-1)`` once the dimension allows full shattering, with
    confidence level ``1/n``.
    """
    if empirical_risk is None:
        ls = _labeled_transform(sample, spec)
        if ls.q != 2:
            raise ParameterError(f"the bound needs 2 classes, got {ls.q}")
        risk = _lda_risk(ls)
        n = ls.n
    else:
        risk = float(empirical_risk)
        n = sample.n
    if n < 2:
        raise ParameterError("the bound needs at least 2 observations")
    dim = spec.L + spec.S
    if dim - 1 >= n - 1:
        shatter = 2 ** (n - 1)
    else:
        shatter = sum(math.comb(n - 1, k) for k in range(dim))
    return risk + math.sqrt((math.log(2 * shatter) - math.log(1.0 / n)) / (2.0 * n))


# ---------------------------------------------------------------------------
# model selection over (L, S)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FunctionalModel:
    """A winning transform plus the classifier trained on it."""

    spec: LSSpec
    T: float
    classifier: str
    inner: object = field(repr=False)
    label_names: tuple = ()
    cardinalities: tuple = ()
    candidates: tuple = ()
    cv_errors: tuple = ()
    vc_bounds: tuple | None = None


def _fit_inner(ls: LabeledSample, classifier: str, depth_spec, separator_spec,
               seed: int):
    if classifier == "ddalpha":
        return train(ls, depth_spec, separator_spec, aggregation="majority",
                     seed=seed)
    if classifier == "maxdepth":
        return train(ls, depth_spec, SeparatorSpec(kind="maxdepth"), seed=seed)
    return train_treatment(OutsiderPolicy(name=classifier, method=classifier,
                                          seed=seed), ls)


def _inner_predict(inner, points) -> np.ndarray:
    if isinstance(inner, TrainedModel):
        return np.asarray(classify(inner, points))
    return np.asarray(classify_treatment(inner, points))


def _cv_error(sample: FunctionalSample, spec: LSSpec, classifier: str,
              depth_spec, separator_spec, seed: int, cv_folds: int) -> int:
    """Stratified cross-validation error count of the full pipeline."""
    ls = _labeled_transform(sample, spec)
    folds = stratified_folds(ls.labels, cv_folds)
    x = ls.data.values
    y = ls.labels
    total = 0
    for fold in range(cv_folds):
        va = folds == fold
        tr = ~va
        if not np.any(va):
            continue
        if np.unique(y[tr]).size < ls.q:
            continue
        inner = _fit_inner(LabeledSample(DataMatrix(x[tr]), y[tr],
                                         label_names=ls.label_names),
                           classifier, depth_spec, separator_spec, seed)
        total += int(np.sum(_inner_predict(inner, x[va]) != y[va]))
    return total


def default_max_dimension(sample: FunctionalSample) -> int:
    """Cap on ``L + S``: half the median grid length, at most 25."""
    lengths = sorted(a.size for a, _ in sample.observations)
    med = float(np.median(lengths))
    return min(25, math.ceil(med / 2.0))


def _candidate_grid(max_dimension: int, instance: str) -> list[LSSpec]:
    out = []
    for total in range(2, max_dimension + 1):
        for s in range(total + 1):
            out.append(LSSpec(L=total - s, S=s, instance=instance))
    return out


def train_functional(sample: FunctionalSample, candidates=None,
                     max_dimension: int | None = None, cv: str = "reduced",
                     classifier: str = "ddalpha",
                     depth_spec: DepthSpec | None = None,
                     separator_spec: SeparatorSpec | None = None,
                     instance: str = "average", keep_fraction: float = 0.3,
                     cv_folds: int = 10, seed: int = 0,
                     threads: int = 1) -> FunctionalModel:
    """Pick ``(L, S)`` by cross-validation and train the final classifier.

    Candidates default to every pair with ``L + S`` between 2 and
    ``max_dimension`` (itself defaulting to half the median grid length,
    capped at 25). ``cv="complete"`` cross-validates every candidate;
    ``cv="reduced"`` first ranks them by :func:`vc_bound` (two-class samples
    only; candidates with a degenerate linear fit rank last) and
    cross-validates the best ``keep_fraction`` share, at least 3. The winner
    is the lowest error; ties prefer smaller ``L + S``, then smaller ``S``.
    Candidate evaluations are independent and run on ``threads`` workers
    with a deterministic aggregation order.
    """
    if sample.labels is None:
        raise ParameterError("training needs a labeled sample")
    if sample.q < 2:
        raise ParameterError("training needs at least 2 classes")
    if cv not in ("complete", "reduced"):
        raise ParameterError(f"`cv` must be 'complete' or 'reduced', got {cv!r}")
    if classifier not in FUNCTIONAL_CLASSIFIERS:
        raise ParameterError(
            f"`classifier` must be one of {FUNCTIONAL_CLASSIFIERS}, got {classifier!r}")
    if threads < 1:
        raise ParameterError(f"`threads` must be >= 1, got {threads}")

    if candidates is None:
        cap = default_max_dimension(sample) if max_dimension is None else max_dimension
        pool = _candidate_grid(cap, instance)
    else:
        pool = [c if isinstance(c, LSSpec) else LSSpec(*c) for c in candidates]
    if not pool:
        raise ParameterError("the candidate set is empty")
    pool = sorted(pool, key=lambda c: (c.L + c.S, c.S))

    bounds = None
    if cv == "reduced":
        if sample.q != 2:
            raise ParameterError("reduced mode ranks candidates by a two-class "
                                 "bound; use cv='complete' for more classes")

        def bound_of(c: LSSpec) -> float:
            try:
                return vc_bound(sample, c)
            except Exception:
                return math.inf

        pool_bounds = _map_ordered(bound_of, pool, threads)
        keep = max(3, math.ceil(keep_fraction * len(pool)))
        keep = min(keep, len(pool))
        order = sorted(range(len(pool)), key=lambda i: (pool_bounds[i], i))[:keep]
        shortlist = [pool[i] for i in sorted(order)]
        bounds = [pool_bounds[i] for i in sorted(order)]
    else:
        shortlist = pool

    def error_of(c: LSSpec) -> int:
        return _cv_error(sample, c, classifier, depth_spec, separator_spec,
                         seed, cv_folds)

    errors = _map_ordered(error_of, shortlist, threads)
    best = min(range(len(shortlist)),
               key=lambda i: (errors[i], shortlist[i].L + shortlist[i].S,
                              shortlist[i].S))
    winner = shortlist[best]

    ls = _labeled_transform(sample, winner)
    inner = _fit_inner(ls, classifier, depth_spec, separator_spec, seed)
    return FunctionalModel(spec=winner, T=sample.T, classifier=classifier,
                           inner=inner, label_names=sample.label_names,
                           cardinalities=tuple(int(c) for c in ls.cardinalities),
                           candidates=tuple(shortlist), cv_errors=tuple(errors),
                           vc_bounds=None if bounds is None else tuple(bounds))


def _map_ordered(fn, items, threads: int) -> list:
    if threads == 1 or len(items) <= 1:
        return [fn(c) for c in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def classify_functional(model: FunctionalModel, sample: FunctionalSample) -> list:
    """Labels for new functions via the stored transform and classifier."""
    if sample.n == 0:
        return []
    x = ls_transform(sample, model.spec, T=model.T).values
    return [int(v) for v in _inner_predict(model.inner, x)]


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def load_functional(path) -> FunctionalSample:
    """Read functions from a JSON list of ``{args, vals, label?}`` entries.

    Labels must be present on all entries or on none.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"functional data file is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise FormatError("functional data must be a JSON list")
    observations = []
    labels = []
    for i, entry in enumerate(doc):
        if not isinstance(entry, dict) or "args" not in entry or "vals" not in entry:
            raise FormatError(f"entry {i} must be an object with `args` and `vals`")
        observations.append((entry["args"], entry["vals"]))
        if "label" in entry:
            labels.append(entry["label"])
    if labels and len(labels) != len(observations):
        raise FormatError("either every entry carries a `label` or none does")
    try:
        return FunctionalSample(observations, labels if labels else None)
    except ParameterError as exc:
        raise FormatError(str(exc)) from None


def save_functional(sample: FunctionalSample, path) -> None:
    """Write functions as the JSON list read by :func:`load_functional`."""
    entries = []
    for i, (args, vals) in enumerate(sample.observations):
        entry = {"args": list(map(float, args)), "vals": list(map(float, vals))}
        if sample.labels is not None:
            entry["label"] = sample.label_names[sample.labels[i] - 1]
        entries.append(entry)
    Path(path).write_text(json.dumps(entries, indent=1), encoding="utf-8")


def save_functional_model(model: FunctionalModel, path) -> None:
    """Write the functional model as versioned JSON embedding its classifier."""
    if isinstance(model.inner, TrainedModel):
        inner = {"form": "depth", "model": model_to_doc(model.inner)}
    else:
        inner = {"form": "treatment", "model": _treatment_json(model.inner)}
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "functional",
        "ls": asdict(model.spec),
        "T": format(model.T, ".17g"),
        "classifier": model.classifier,
        "label_map": {str(j + 1): name for j, name in enumerate(model.label_names)},
        "cardinalities": list(model.cardinalities),
        "inner": inner,
        "candidates": [[c.L, c.S] for c in model.candidates],
        "cv_errors": list(model.cv_errors),
        "vc_bounds": (None if model.vc_bounds is None
                      else [format(b, ".17g") for b in model.vc_bounds]),
    }
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def load_functional_model(path) -> FunctionalModel:
    """Read a model saved by :func:`save_functional_model`."""
    doc = _read_versioned(path)
    if doc.get("kind") != "functional":
        raise FormatError("not a functional model file")
    try:
        spec = LSSpec(**doc["ls"])
        label_map = doc["label_map"]
        names = tuple(label_map[str(j + 1)] for j in range(len(label_map)))
        cardinalities = tuple(int(v) for v in doc["cardinalities"])
        if doc["inner"]["form"] == "depth":
            inner = model_from_doc(doc["inner"]["model"])
        else:
            inner = _treatment_from_json(doc["inner"]["model"], len(names),
                                         cardinalities)
        bounds = doc["vc_bounds"]
        return FunctionalModel(
            spec=spec, T=float(doc["T"]), classifier=doc["classifier"],
            inner=inner, label_names=names, cardinalities=cardinalities,
            candidates=tuple(LSSpec(L=int(a), S=int(b), instance=spec.instance)
                             for a, b in doc["candidates"]),
            cv_errors=tuple(int(v) for v in doc["cv_errors"]),
            vc_bounds=None if bounds is None else tuple(float(b) for b in bounds))
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"functional model file is missing or corrupt: {exc}") from None
