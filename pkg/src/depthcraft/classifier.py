"""End-to-end depth classification: train, classify, save, load.

Training freezes per-class depth statistics once, maps the sample into the
depth space, and fits one or more separation rules on top:

* ``majority``: one binary rule per class pair, votes aggregated;
* ``sequent``: one rule per class against the rest, first claim wins;
* ``none``: a single multiclass rule (only for rules that support it).

Classification maps queries through the same frozen statistics. Points with
no depth information (outsiders) are routed to a named fallback treatment
instead of the depth rules. Models serialize to versioned JSON with floats
written as 17-significant-digit decimal text, so a reloaded model classifies
bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .datamodel import LabeledSample
from .depths.api import depth_rows, freeze_cloud
from .depths.spec import DepthSpec
from .depths.zonoid import in_convex_hull
from .errors import FormatError, ParameterError
from .estimators import _finish, inv_sqrt
from .outsiders import (OutsiderPolicy, TreatmentModel, classify_treatment,
                        train_treatment)
from .separators import (AlphaModel, DknnModel, KnnDepthModel, PolynomialModel,
                         SeparatorSpec, classify_alpha, classify_dknn,
                         classify_knn_depthspace, classify_maxdepth,
                         classify_polynomial, extend, train_alpha_cv, train_dknn,
                         train_knn_depthspace, train_polynomial)

__all__ = [
    "SeparatorRecord",
    "TrainedModel",
    "train",
    "classify",
    "outsider_flags",
    "save_model",
    "load_model",
    "model_to_doc",
    "model_from_doc",
]

FORMAT_VERSION = 1

AGGREGATIONS = ("majority", "sequent", "none")

_ZERO_DEPTH_TOL = 1e-12


# ---------------------------------------------------------------------------
# model container
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SeparatorRecord:
    """One fitted rule plus the classes it tells apart.

    ``index1`` scores positive; ``index2`` is None for one-against-rest
    rules, and both are None for a single multiclass rule.
    """

    index1: int | None
    index2: int | None
    kind: str
    model: object | None


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """Everything classification needs, immutable once trained."""

    depth_spec: DepthSpec
    separator_spec: SeparatorSpec
    aggregation: str
    use_convex: bool
    seed: int
    label_names: tuple[str, ...]
    cardinalities: tuple[int, ...]
    clouds: tuple[np.ndarray, ...]
    class_stats: tuple = field(repr=False)
    separators: tuple[SeparatorRecord, ...] = ()
    treatments: dict = field(default_factory=dict, repr=False)
    default_policy: str = "lda"

    @property
    def q(self) -> int:
        return len(self.clouds)

    @property
    def d(self) -> int:
        return self.clouds[0].shape[1]


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def _freeze_classes(clouds, counts, depth_spec: DepthSpec):
    """Per-class frozen statistics, with the pooled whitening for potential."""
    n = sum(counts)
    pretransform = None
    if depth_spec.notion == "potential":
        pooled = np.zeros((clouds[0].shape[1],) * 2)
        for cloud in clouds:
            dev = cloud - cloud.mean(axis=0)
            pooled += dev.T @ dev
        pooled /= n - len(clouds)
        pretransform = inv_sqrt(pooled)
    return tuple(
        freeze_cloud(cloud, depth_spec, prior=count / n, pretransform=pretransform)
        for cloud, count in zip(clouds, counts))


def _signed(labels: np.ndarray, positive) -> np.ndarray:
    return np.where(np.isin(labels, positive), 1, -1)


def train(sample: LabeledSample, depth_spec: DepthSpec | None = None,
          separator_spec: SeparatorSpec | None = None,
          aggregation: str = "majority",
          outsider_policies=None, use_convex: bool = False, seed: int = 0,
          threads: int = 1) -> TrainedModel:
    """Train a depth classifier on a labeled sample.

    The depth space is built once from frozen per-class statistics; the
    separator layout follows ``aggregation`` (coerced to ``none`` for the
    inherently multiclass maxdepth and dknn rules). Every outsider policy is
    trained up front so classification can pick one by name. Deterministic
    given the specs and ``seed``.
    """
    depth_spec = depth_spec if depth_spec is not None else DepthSpec(notion="halfspace")
    separator_spec = separator_spec if separator_spec is not None else SeparatorSpec()
    if aggregation not in AGGREGATIONS:
        raise ParameterError(
            f"`aggregation` must be one of {AGGREGATIONS}, got {aggregation!r}")
    q = sample.q
    if q < 2:
        raise ParameterError("training needs at least 2 classes")
    kind = separator_spec.kind
    if kind in ("maxdepth", "dknn"):
        aggregation = "none"
    if q > 2:
        if kind == "alpha" and aggregation == "none":
            raise ParameterError(
                "the alpha rule is binary; use aggregation 'majority' or 'sequent'")
        if kind == "polynomial" and aggregation != "majority":
            raise ParameterError(
                "the polynomial rule is binary; use aggregation 'majority'")

    counts = tuple(int(c) for c in sample.cardinalities)
    clouds = tuple(sample.class_rows(j) for j in range(1, q + 1))
    stats = _freeze_classes(clouds, counts, depth_spec)
    labels = sample.labels

    separators: list[SeparatorRecord] = []
    if kind == "dknn":
        model = train_dknn(sample, depth_spec, k_max=separator_spec.knn_range,
                           seed=seed)
        separators.append(SeparatorRecord(None, None, "dknn", model))
    elif kind == "maxdepth":
        separators.append(SeparatorRecord(None, None, "maxdepth", None))
    else:
        rows = depth_rows(sample.data.values, stats, threads=threads)
        if q == 2:
            separators.append(_train_binary(rows, labels, 1, 2, separator_spec,
                                            columns=(0, 1)))
        elif aggregation == "none":
            model = train_knn_depthspace(rows, labels,
                                         k_max=separator_spec.knn_range)
            separators.append(SeparatorRecord(None, None, "knn", model))
        elif aggregation == "majority":
            for i, j in combinations(range(1, q + 1), 2):
                mask = (labels == i) | (labels == j)
                separators.append(_train_binary(rows[mask], labels[mask], i, j,
                                                separator_spec,
                                                columns=(i - 1, j - 1)))
        else:  # sequent
            for j in range(1, q + 1):
                separators.append(_train_one_vs_rest(rows, labels, j,
                                                     separator_spec))

    policies = outsider_policies
    if policies is None:
        policies = (OutsiderPolicy(name="lda", method="lda"),)
    treatments = {}
    for policy in policies:
        if policy.name in treatments:
            raise ParameterError(f"duplicate outsider policy name {policy.name!r}")
        treatments[policy.name] = train_treatment(policy, sample)
    default_policy = policies[0].name if policies else "lda"

    return TrainedModel(depth_spec=depth_spec, separator_spec=separator_spec,
                        aggregation=aggregation, use_convex=use_convex, seed=seed,
                        label_names=sample.label_names, cardinalities=counts,
                        clouds=clouds, class_stats=stats,
                        separators=tuple(separators), treatments=treatments,
                        default_policy=default_policy)


def _train_binary(rows, labels, i: int, j: int, spec: SeparatorSpec,
                  columns) -> SeparatorRecord:
    """One binary rule for class pair (i, j); +1 means class i.

    The alpha rule searches the full depth space, while the polynomial and
    neighbour rules see only the pair's two depth columns (their native
    plot).
    """
    y = _signed(labels, (i,))
    if spec.kind == "alpha":
        model, _ = train_alpha_cv(rows, y, max_degree=spec.max_degree,
                                  cv_folds=spec.cv_folds)
    elif spec.kind == "polynomial":
        model = train_polynomial(rows[:, list(columns)], y,
                                 max_degree=spec.max_degree,
                                 cv_folds=spec.cv_folds, seed=spec.seed)
    else:  # knn
        model = train_knn_depthspace(rows[:, list(columns)], labels,
                                     k_max=spec.knn_range)
    return SeparatorRecord(i, j, spec.kind, model)


def _train_one_vs_rest(rows, labels, j: int, spec: SeparatorSpec) -> SeparatorRecord:
    """One rule for class j against everything else, on all depth columns."""
    if spec.kind == "alpha":
        y = _signed(labels, (j,))
        model, _ = train_alpha_cv(rows, y, max_degree=spec.max_degree,
                                  cv_folds=spec.cv_folds)
    else:  # knn; 1 = the target class, 2 = the rest
        binary = np.where(labels == j, 1, 2)
        model = train_knn_depthspace(rows, binary, k_max=spec.knn_range)
    return SeparatorRecord(j, None, spec.kind, model)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _binary_scores(record: SeparatorRecord, rows: np.ndarray) -> np.ndarray:
    """Signed scores of one binary rule on full depth rows (positive = index1)."""
    if record.kind == "alpha":
        return np.atleast_1d(classify_alpha(
            record.model, extend(rows, record.model.degree).features))
    i, j = record.index1, record.index2
    pair = rows[:, [i - 1, j - 1]]
    if record.kind == "polynomial":
        return np.atleast_1d(classify_polynomial(record.model, pair))
    preds = np.atleast_1d(classify_knn_depthspace(record.model, pair))
    return np.where(preds == i, 1.0, -1.0)


def _prefer(candidates, cardinalities) -> int:
    """Among 1-based class indices, pick the largest class, then the smallest index."""
    return min(candidates, key=lambda c: (-cardinalities[c - 1], c))


def outsider_flags(model: TrainedModel, points, rows: np.ndarray | None = None,
                   threads: int = 1) -> np.ndarray:
    """Boolean mask of query points the depth rules cannot place.

    With ``use_convex`` the test is membership in every class's convex hull;
    otherwise a point is an outsider when its depth is (numerically) zero
    for every class. ``rows`` lets callers that already computed the depth
    matrix skip recomputing it.
    """
    pts = np.atleast_2d(np.asarray(getattr(points, "values", points), dtype=float))
    if model.use_convex:
        flags = np.ones(pts.shape[0], dtype=bool)
        for stats in model.class_stats:
            queries = pts
            if stats.pretransform is not None:
                queries = np.einsum("...d,ed->...e", pts, stats.pretransform)
            for i in range(pts.shape[0]):
                if flags[i] and in_convex_hull(queries[i], stats.cloud):
                    flags[i] = False
        return flags
    if rows is None:
        rows = depth_rows(pts, model.class_stats, threads=threads)
    return np.all(rows < _ZERO_DEPTH_TOL, axis=1)


def classify(model: TrainedModel, points, policy: str | None = None,
             rng=None, threads: int = 1) -> list:
    """Labels (1-based class indices, or the ignore marker) for query points.

    Depths of the queries are computed against the statistics frozen at
    training time. Outsiders are routed to the named treatment (default:
    the first policy trained). ``rng`` drives only tie-breaks and the random
    treatments; omitting it seeds a fresh generator from the model, making
    the call a pure function of its inputs.
    """
    pts = np.asarray(getattr(points, "values", points), dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.d:
        raise ParameterError(
            f"points have {pts.shape[1]} columns, model expects {model.d}")
    if rng is None:
        rng = np.random.default_rng(model.seed)
    name = policy if policy is not None else model.default_policy
    if name not in model.treatments:
        raise ParameterError(
            f"unknown outsider policy {name!r}; trained: {sorted(model.treatments)}")

    first = model.separators[0]
    if first.kind == "dknn":
        out = np.atleast_1d(classify_dknn(first.model, pts, rng))
        preds = [int(v) for v in out]
        return preds[0] if single else preds

    rows = depth_rows(pts, model.class_stats, threads=threads)
    flags = outsider_flags(model, pts, rows=rows)

    preds: list = [None] * pts.shape[0]
    inside = np.flatnonzero(~flags)

    if inside.size:
        sub = rows[inside]
        if first.kind == "maxdepth":
            for pos, i in enumerate(inside):
                preds[i] = classify_maxdepth(sub[pos], rng)
        elif model.q == 2 or model.aggregation == "none":
            if first.index1 is None:  # single multiclass neighbour rule
                out = np.atleast_1d(classify_knn_depthspace(first.model, sub))
                for pos, i in enumerate(inside):
                    preds[i] = int(out[pos])
            else:
                scores = _binary_scores(first, sub)
                for pos, i in enumerate(inside):
                    preds[i] = first.index1 if scores[pos] > 0 else first.index2
        elif model.aggregation == "majority":
            votes = np.zeros((inside.size, model.q + 1), dtype=int)
            for record in model.separators:
                scores = _binary_scores(record, sub)
                for pos in range(inside.size):
                    votes[pos, record.index1 if scores[pos] > 0 else record.index2] += 1
            for pos, i in enumerate(inside):
                best = votes[pos].max()
                tied = [int(c) for c in np.flatnonzero(votes[pos] == best) if c >= 1]
                preds[i] = _prefer(tied, model.cardinalities)
        else:  # sequent: first one-vs-rest rule that claims the point
            claims = np.zeros((inside.size, model.q + 1), dtype=bool)
            for record in model.separators:
                if record.kind == "alpha":
                    scores = np.atleast_1d(classify_alpha(
                        record.model, extend(sub, record.model.degree).features))
                    claimed = scores > 0
                else:
                    claimed = np.atleast_1d(
                        classify_knn_depthspace(record.model, sub)) == 1
                claims[:, record.index1] = claimed
            fallback = _prefer(range(1, model.q + 1), model.cardinalities)
            for pos, i in enumerate(inside):
                hit = np.flatnonzero(claims[pos, 1:])
                preds[i] = int(hit[0]) + 1 if hit.size else fallback

    outside = np.flatnonzero(flags)
    if outside.size:
        labels = classify_treatment(model.treatments[name], pts[outside], rng)
        for pos, i in enumerate(outside):
            preds[i] = labels[pos]

    return preds[0] if single else preds


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _text(v) -> str:
    return format(float(v), ".17g")


def _texts(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return [_text(v) for v in a]
    return [_texts(row) for row in a]


def _floats(node) -> np.ndarray:
    return np.asarray(node, dtype=float)


def _separator_json(record: SeparatorRecord) -> dict:
    doc = {"index1": record.index1, "index2": record.index2, "kind": record.kind}
    m = record.model
    if record.kind == "alpha":
        doc.update(degree=m.degree, exponents=[list(e) for e in m.exponents],
                   normal=_texts(m.normal),
                   chosen=[[p, _text(a)] for p, a in m.chosen],
                   risk_trace=list(m.risk_trace))
    elif record.kind == "polynomial":
        doc.update(degree=m.degree, swapped=m.swapped, cv_error=m.cv_error,
                   coefficients=_texts(m.coefficients))
    elif record.kind == "knn":
        doc.update(k=m.k, points=_texts(m.points),
                   labels=[int(v) for v in m.labels],
                   class_labels=list(m.class_labels),
                   class_counts=list(m.class_counts),
                   loo_trace=list(m.loo_trace))
    elif record.kind == "dknn":
        doc.update(k=m.k, points=_texts(m.points),
                   labels=[int(v) for v in m.labels],
                   loo_trace=list(m.loo_trace),
                   depth_spec=asdict(m.depth_spec))
    return doc


def _separator_from_json(doc: dict) -> SeparatorRecord:
    kind = doc["kind"]
    if kind == "alpha":
        model = AlphaModel(normal=_floats(doc["normal"]),
                           chosen=tuple((int(p), float(a)) for p, a in doc["chosen"]),
                           risk_trace=tuple(int(v) for v in doc["risk_trace"]),
                           degree=int(doc["degree"]),
                           exponents=tuple(tuple(int(v) for v in e)
                                           for e in doc["exponents"]))
    elif kind == "polynomial":
        model = PolynomialModel(coefficients=_floats(doc["coefficients"]),
                                degree=int(doc["degree"]),
                                swapped=bool(doc["swapped"]),
                                cv_error=int(doc["cv_error"]))
    elif kind == "knn":
        model = KnnDepthModel(points=_floats(doc["points"]),
                              labels=np.asarray(doc["labels"], dtype=int),
                              k=int(doc["k"]),
                              class_labels=tuple(int(v) for v in doc["class_labels"]),
                              class_counts=tuple(int(v) for v in doc["class_counts"]),
                              loo_trace=tuple(int(v) for v in doc["loo_trace"]))
    elif kind == "dknn":
        model = DknnModel(points=_floats(doc["points"]),
                          labels=np.asarray(doc["labels"], dtype=int),
                          k=int(doc["k"]),
                          depth_spec=DepthSpec(**doc["depth_spec"]),
                          loo_trace=tuple(int(v) for v in doc["loo_trace"]))
    elif kind == "maxdepth":
        model = None
    else:
        raise FormatError(f"unknown separator kind {kind!r}")
    index1 = doc["index1"]
    index2 = doc["index2"]
    return SeparatorRecord(index1=None if index1 is None else int(index1),
                           index2=None if index2 is None else int(index2),
                           kind=kind, model=model)


def _treatment_json(t: TreatmentModel) -> dict:
    method = t.policy.method
    state = t.state
    doc: dict = {"policy": asdict(t.policy)}
    if method == "lda":
        doc["state"] = {"w": _texts(state["w"]), "b": _texts(state["b"])}
    elif method == "qda":
        doc["state"] = {"means": _texts(state["means"]),
                        "invs": [_texts(m) for m in state["invs"]],
                        "logdets": [_text(v) for v in state["logdets"]],
                        "log_priors": _texts(state["log_priors"])}
    elif method == "knn":
        m = state["model"]
        doc["state"] = {"points": _texts(m.points),
                        "labels": [int(v) for v in m.labels], "k": m.k,
                        "class_labels": list(m.class_labels),
                        "class_counts": list(m.class_counts),
                        "loo_trace": list(m.loo_trace)}
    elif method == "knn-affine":
        doc["state"] = {"whiten": _texts(state["whiten"]),
                        "pairs": [[a, b, {"points": _texts(p), "labels":
                                          [int(v) for v in lab], "k": k}]
                                  for a, b, (p, lab, k) in state["pairs"]]}
    elif method == "maxdepth-mahalanobis":
        doc["state"] = {"per_class": [
            {"rows": _texts(cloud), "mu": _texts(est.mu),
             "sigma": _texts(est.sigma), "kind": est.kind}
            for cloud, est in state["per_class"]]}
    else:
        doc["state"] = {}
    return doc


def _treatment_from_json(doc: dict, q: int, cardinalities) -> TreatmentModel:
    policy = OutsiderPolicy(**doc["policy"])
    raw = doc["state"]
    method = policy.method
    state: dict = {}
    if method == "lda":
        state = {"w": _floats(raw["w"]), "b": _floats(raw["b"])}
    elif method == "qda":
        state = {"means": _floats(raw["means"]),
                 "invs": tuple(_floats(m) for m in raw["invs"]),
                 "logdets": tuple(float(v) for v in raw["logdets"]),
                 "log_priors": _floats(raw["log_priors"])}
    elif method == "knn":
        state = {"model": KnnDepthModel(
            points=_floats(raw["points"]),
            labels=np.asarray(raw["labels"], dtype=int), k=int(raw["k"]),
            class_labels=tuple(int(v) for v in raw["class_labels"]),
            class_counts=tuple(int(v) for v in raw["class_counts"]),
            loo_trace=tuple(int(v) for v in raw["loo_trace"]))}
    elif method == "knn-affine":
        state = {"whiten": _floats(raw["whiten"]),
                 "pairs": tuple((int(a), int(b),
                                 (_floats(f["points"]),
                                  np.asarray(f["labels"], dtype=int),
                                  int(f["k"])))
                                for a, b, f in raw["pairs"])}
    elif method == "maxdepth-mahalanobis":
        state = {"per_class": tuple(
            (_floats(e["rows"]), _finish(_floats(e["mu"]), _floats(e["sigma"]),
                                         e["kind"]))
            for e in raw["per_class"])}
    return TreatmentModel(policy=policy, q=q,
                          cardinalities=tuple(cardinalities), state=state)


def model_to_doc(model: TrainedModel) -> dict:
    """The model as a JSON-ready dict (floats: 17-significant-digit text)."""
    return {
        "format_version": FORMAT_VERSION,
        "depth_spec": asdict(model.depth_spec),
        "separator_spec": asdict(model.separator_spec),
        "aggregation": model.aggregation,
        "use_convex": model.use_convex,
        "seed": model.seed,
        "label_map": {str(j + 1): name for j, name in enumerate(model.label_names)},
        "classes": [{"cardinality": int(c), "rows": _texts(cloud)}
                    for c, cloud in zip(model.cardinalities, model.clouds)],
        "separators": [_separator_json(r) for r in model.separators],
        "outsiders": {name: _treatment_json(t)
                      for name, t in model.treatments.items()},
        "default_policy": model.default_policy,
    }


def save_model(model: TrainedModel, path) -> None:
    """Write the model as versioned JSON."""
    Path(path).write_text(json.dumps(model_to_doc(model), indent=1),
                          encoding="utf-8")


def _read_versioned(path) -> dict:
    """Parse a model file and check its format version."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise FormatError("model file has no `format_version`")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise FormatError(
            f"model format_version {version} is not supported; this build "
            f"reads version {FORMAT_VERSION} and has no migration for others")
    return doc


def model_from_doc(doc: dict) -> TrainedModel:
    """Rebuild a model from its dict form, refreezing class statistics.

    The per-class statistics (estimates, directions, simplex tuples) are a
    deterministic function of the stored clouds and the depth spec seed, so
    rebuilding them reproduces the training-time values bit for bit.
    """
    try:
        depth_spec = DepthSpec(**doc["depth_spec"])
        separator_spec = SeparatorSpec(**doc["separator_spec"])
        aggregation = doc["aggregation"]
        if aggregation not in AGGREGATIONS:
            raise FormatError(f"unknown aggregation {aggregation!r}")
        label_map = doc["label_map"]
        q = len(doc["classes"])
        label_names = tuple(label_map[str(j)] for j in range(1, q + 1))
        counts = []
        clouds = []
        for entry in doc["classes"]:
            rows = _floats(entry["rows"])
            if rows.ndim != 2 or rows.shape[0] != int(entry["cardinality"]):
                raise FormatError("class rows do not match the stored cardinality")
            counts.append(int(entry["cardinality"]))
            clouds.append(rows)
        separators = tuple(_separator_from_json(s) for s in doc["separators"])
        treatments = {name: _treatment_from_json(t, q, counts)
                      for name, t in doc["outsiders"].items()}
        default_policy = doc["default_policy"]
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"model file is missing or corrupt: {exc}") from None

    expected = {"majority": q * (q - 1) // 2 if q > 2 else 1,
                "sequent": q if q > 2 else 1,
                "none": 1}[aggregation]
    if len(separators) != expected:
        raise FormatError(
            f"aggregation {aggregation!r} with {q} classes needs {expected} "
            f"separators, found {len(separators)}")
    if default_policy not in treatments and treatments:
        raise FormatError(f"default policy {default_policy!r} is not stored")

    stats = _freeze_classes(tuple(clouds), tuple(counts), depth_spec)
    return TrainedModel(depth_spec=depth_spec, separator_spec=separator_spec,
                        aggregation=aggregation, use_convex=bool(doc["use_convex"]),
                        seed=int(doc["seed"]), label_names=label_names,
                        cardinalities=tuple(counts), clouds=tuple(clouds),
                        class_stats=stats, separators=separators,
                        treatments=treatments, default_policy=default_policy)


def load_model(path) -> TrainedModel:
    """Read a model saved by :func:`save_model`."""
    return model_from_doc(_read_versioned(path))
