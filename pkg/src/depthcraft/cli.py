"""Command-line frontend.

One subcommand per task: depth evaluation, depth spaces, training,
classification, error estimation, benchmarks, functional pipelines,
drawings, and synthetic data. Machine-readable CSV or JSON goes to stdout
and is byte-identical across repeated runs with the same flags and seed;
diagnostics and wall-clock timings go to stderr or to files named by
flags, never to stdout.

A JSON config file (``--config``) may supply any flag of the chosen
subcommand by its kebab-case name; values given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np
from numpy.random import default_rng

from .bench import (BenchConfig, cv_error, maxdepth_experiment,
                    partition_error, time_depths)
from .classifier import (_freeze_classes, classify, load_model, model_to_doc,
                         save_model, train)
from .datamodel import (GeneratorSpec, LabeledSample, generate_two_class,
                        load_csv)
from .depths.api import depth_rows, depth_space, freeze_cloud
from .depths.spec import NOTIONS, DepthSpec
from .errors import (DepthcraftError, FormatError, ParameterError, SizeError)
from .functional import (FUNCTIONAL_CLASSIFIERS, classify_functional,
                         load_functional, load_functional_model,
                         save_functional_model, train_functional)
from .outsiders import OutsiderPolicy
from .separators import SEPARATOR_KINDS, SeparatorSpec
from .viz import (contour_grid, ddplot_from_model, ddplot_from_space,
                  render_contours_svg, render_ddplot_svg, render_surface_svg,
                  surface_grid, write_grid_csv)

__all__ = ["main"]

# Subcommands that expose --exact/--approx; their size-cap errors carry a
# hint toward the approximate route.
_APPROX_COMMANDS = frozenset(
    {"depth", "ddspace", "train", "cv", "partition", "contours", "surface",
     "ddplot", "ftrain"})


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------


def _g17(v) -> str:
    return format(float(v), ".17g")


def _print(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _note(text: str) -> None:
    sys.stderr.write(text + "\n")


def _resolve_threads(args) -> int:
    value = getattr(args, "threads", None)
    if value is None:
        env = os.environ.get("DEPTHCRAFT_THREADS")
        value = env if env else (os.cpu_count() or 1)
    try:
        value = int(value)
    except ValueError:
        raise ParameterError(f"`threads` must be an integer, got {value!r}")
    if value < 1:
        raise ParameterError(f"`threads` must be >= 1, got {value}")
    return value


def _int_or_float(value, flag: str):
    """A count when integral, a fraction otherwise (for --size style flags)."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return int(value) if value.is_integer() and value >= 1 else value
    text = str(value).strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"`{flag}` must be a number, got {value!r}")


def _parse_vector(text, flag: str) -> tuple:
    try:
        return tuple(float(t) for t in str(text).split(","))
    except ValueError:
        raise ParameterError(
            f"`{flag}` must be comma-separated numbers, got {text!r}")


def _parse_matrix(text, flag: str) -> tuple:
    rows = [r for r in str(text).split(";") if r.strip()]
    return tuple(_parse_vector(r, flag) for r in rows)


def _depth_spec(args) -> DepthSpec:
    return DepthSpec(notion=args.notion, estimator=args.mah_estimate,
                     mcd_fraction=args.mcd_fraction, exact=args.exact,
                     num_directions=args.num_directions,
                     simplex_count=args.simplex_count,
                     bandwidth=args.bandwidth, refine=args.refine,
                     exact_cap=args.exact_cap, simplex_cap=args.simplex_cap,
                     seed=args.seed)


def _separator_spec(args) -> SeparatorSpec:
    return SeparatorSpec(kind=args.separator, max_degree=args.max_degree,
                         knn_range=args.knn_range, cv_folds=args.cv_folds,
                         seed=args.seed)


def _policies(args) -> tuple:
    methods = [t.strip() for t in str(args.outsider_method).split(",")
               if t.strip()]
    if not methods:
        raise ParameterError("`outsider-method` must name at least one method")
    return tuple(OutsiderPolicy(name=m, method=m, seed=args.seed)
                 for m in methods)


def _labeled(path) -> LabeledSample:
    sample = load_csv(path, label_column="last")
    return sample


def _points(path) -> np.ndarray:
    return load_csv(path, label_column="none").values


def _parse_notion_tokens(text) -> dict:
    """``notion`` or ``notion:estimator`` tokens into named depth settings."""
    specs = {}
    for token in str(text).split(","):
        token = token.strip()
        if not token:
            continue
        name, _, est = token.partition(":")
        specs[token] = DepthSpec(notion=name, estimator=est or "moment")
    if not specs:
        raise ParameterError("`notions` must name at least one depth")
    return specs


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _labels_csv(predictions, label_names) -> str:
    lines = ["label"]
    for p in predictions:
        lines.append(p if isinstance(p, str) else label_names[int(p) - 1])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_depth(args) -> int:
    data = _points(getattr(args, "in"))
    queries = _points(args.query)
    spec = _depth_spec(args)
    stats = freeze_cloud(data, spec)
    vals = depth_rows(queries, [stats], threads=_resolve_threads(args))[:, 0]
    _print("depth\n" + "\n".join(_g17(v) for v in vals))
    return 0


def _cmd_ddspace(args) -> int:
    sample = _labeled(getattr(args, "in"))
    spec = _depth_spec(args)
    threads = _resolve_threads(args)
    if args.query is None:
        rows = depth_space(sample, spec, threads=threads).depths
    else:
        clouds = tuple(sample.class_rows(j) for j in range(1, sample.q + 1))
        counts = tuple(int(c) for c in sample.cardinalities)
        stats = _freeze_classes(clouds, counts, spec)
        rows = depth_rows(_points(args.query), stats, threads=threads)
    header = ",".join(f"C{j}" for j in range(1, rows.shape[1] + 1))
    body = "\n".join(",".join(_g17(v) for v in row) for row in rows)
    _print(header + "\n" + body)
    return 0


def _trained_model(args, sample):
    return train(sample, _depth_spec(args), separator_spec=_separator_spec(args),
                 aggregation=args.aggregation, outsider_policies=_policies(args),
                 use_convex=args.use_convex, seed=args.seed,
                 threads=_resolve_threads(args))


def _cmd_train(args) -> int:
    sample = _labeled(getattr(args, "in"))
    model = _trained_model(args, sample)
    if args.out is None:
        _print(json.dumps(model_to_doc(model), indent=1))
        return 0
    save_model(model, args.out)
    summary = {"aggregation": model.aggregation, "classes": list(model.label_names),
               "d": model.d, "n": int(sum(model.cardinalities)),
               "out": str(args.out), "q": model.q,
               "separators": len(model.separators)}
    _print(json.dumps(summary, sort_keys=True))
    return 0


def _cmd_classify(args) -> int:
    model = load_model(args.model)
    points = _points(getattr(args, "in"))
    rng = None if args.seed is None else default_rng(args.seed)
    preds = classify(model, points, policy=args.outsider_method, rng=rng,
                     threads=_resolve_threads(args))
    _print(_labels_csv(preds, model.label_names))
    return 0


def _bench_config(args, threads: int) -> BenchConfig:
    return BenchConfig(depth_spec=_depth_spec(args),
                       separator_spec=_separator_spec(args),
                       aggregation=args.aggregation,
                       outsider_policies=_policies(args),
                       use_convex=args.use_convex, seed=args.seed,
                       threads=threads)


def _cmd_cv(args) -> int:
    sample = _labeled(getattr(args, "in"))
    config = _bench_config(args, _resolve_threads(args))
    err = cv_error(sample, args.numchunks, config)
    _print(json.dumps({"error": float(err), "numchunks": int(args.numchunks)},
                      sort_keys=True))
    return 0


def _cmd_partition(args) -> int:
    sample = _labeled(getattr(args, "in"))
    config = _bench_config(args, threads=1)
    size = _int_or_float(args.size, "size")
    errors, mean, sd, time_mean, time_sd = partition_error(
        sample, size, args.times, config)
    _note(f"time_mean={time_mean:.6f}s time_sd={time_sd:.6f}s")
    _print(json.dumps({"errors": [float(e) for e in errors],
                       "mean": float(mean), "sd": float(sd)}, sort_keys=True))
    return 0


def _cmd_bench_maxdepth(args) -> int:
    df = float(args.df)
    specs = _parse_notion_tokens(args.notions)
    rows = maxdepth_experiment(df, args.n, specs, args.reps,
                               test_size=args.test_size, seed=args.seed)
    _print(_rows_csv(rows))
    return 0


def _cmd_bench_time(args) -> int:
    specs = _parse_notion_tokens(args.notions)
    dims = [int(v) for v in _parse_vector(args.dims, "dims")]
    sizes = [int(v) for v in _parse_vector(args.sizes, "sizes")]
    rows = time_depths(specs, dims, sizes,
                       points_per_cell=args.points_per_cell,
                       budget_seconds=args.budget_seconds, seed=args.seed)
    Path(args.out).write_text(_rows_csv(rows), encoding="utf-8")
    _print(json.dumps({"cells": len(rows), "out": str(args.out)},
                      sort_keys=True))
    return 0


def _cmd_ftrain(args) -> int:
    sample = load_functional(getattr(args, "in"))
    num_fcn, num_der = args.num_fcn, args.num_der
    if (num_fcn < 0) != (num_der < 0):
        raise ParameterError(
            "`num-fcn` and `num-der` must be given together (or both "
            "left at -1 for the automatic scan)")
    candidates = None if num_fcn < 0 else [(num_fcn, num_der)]
    model = train_functional(
        sample, candidates=candidates,
        max_dimension=args.max_num_intervals,
        cv="complete" if args.cv_complete else "reduced",
        classifier=args.classifier,
        depth_spec=_depth_spec(args),
        separator_spec=_separator_spec(args),
        instance=args.adc_instance, cv_folds=args.cv_folds,
        seed=args.seed, threads=_resolve_threads(args))
    best = float(min(model.cv_errors)) if model.cv_errors else None
    summary = {"classifier": model.classifier, "cv-error": best,
               "num-der": model.spec.S, "num-fcn": model.spec.L}
    if args.out is None:
        _print(json.dumps(summary, sort_keys=True))
        _note("no --out given; model not saved")
        return 0
    save_functional_model(model, args.out)
    summary["out"] = str(args.out)
    _print(json.dumps(summary, sort_keys=True))
    return 0


def _cmd_fclassify(args) -> int:
    model = load_functional_model(args.model)
    sample = load_functional(getattr(args, "in"))
    preds = classify_functional(model, sample)
    _print(_labels_csv(preds, model.label_names))
    return 0


def _cmd_contours(args) -> int:
    data = _points(getattr(args, "in"))
    result = contour_grid(data, _depth_spec(args), frequency=args.frequency,
                          levels=args.levels, threads=_resolve_threads(args))
    if args.svg is not None:
        render_contours_svg(result, path=args.svg)
    lines = ["level,line,x,y"]
    for k, (level, line) in enumerate(result.polylines):
        for x, y in line:
            lines.append(f"{_g17(level)},{k},{_g17(x)},{_g17(y)}")
    _print("\n".join(lines))
    return 0


def _cmd_surface(args) -> int:
    data = _points(getattr(args, "in"))
    result = surface_grid(data, _depth_spec(args), xnum=args.xnum,
                          ynum=args.ynum, threads=_resolve_threads(args))
    if args.svg is not None:
        render_surface_svg(result, path=args.svg)
    lines = ["x,y,depth"]
    for i, xv in enumerate(result.xs):
        for j, yv in enumerate(result.ys):
            lines.append(f"{_g17(xv)},{_g17(yv)},{_g17(result.values[i, j])}")
    _print("\n".join(lines))
    return 0


def _cmd_ddplot(args) -> int:
    has_model = args.model is not None
    has_data = getattr(args, "in") is not None
    if has_model == has_data:
        raise ParameterError("give exactly one of `model` and `in`")
    if has_model:
        model = load_model(args.model)
        result = ddplot_from_model(model, draw_separation=not args.no_separation,
                                   threads=_resolve_threads(args))
    else:
        sample = _labeled(getattr(args, "in"))
        space = depth_space(sample, _depth_spec(args),
                            threads=_resolve_threads(args))
        result = ddplot_from_space(space.depths, sample.labels)
    if args.svg is not None:
        render_ddplot_svg(result, path=args.svg)
    lines = ["panel,index1,index2,label,d1,d2"]
    for k, panel in enumerate(result.panels):
        for (x, y), lab in zip(panel.points, panel.labels):
            lines.append(f"{k},{panel.index1},{panel.index2},{int(lab)},"
                         f"{_g17(x)},{_g17(y)}")
    _print("\n".join(lines))
    return 0


def _cmd_generate(args) -> int:
    spec = GeneratorSpec(mu1=_parse_vector(args.mu1, "mu1"),
                         mu2=_parse_vector(args.mu2, "mu2"),
                         sigma=_parse_matrix(args.sigma, "sigma"),
                         family=args.family, df=args.df, seed=args.seed)
    sample = generate_two_class(spec, args.n_per_class)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for i in range(sample.n):
        row = [repr(float(v)) for v in sample.data.values[i]]
        row.append(sample.label_names[sample.labels[i] - 1])
        writer.writerow(row)
    _print(buf.getvalue())
    return 0


_HANDLERS = {
    "depth": _cmd_depth, "ddspace": _cmd_ddspace, "train": _cmd_train,
    "classify": _cmd_classify, "cv": _cmd_cv, "partition": _cmd_partition,
    "bench-maxdepth": _cmd_bench_maxdepth, "bench-time": _cmd_bench_time,
    "ftrain": _cmd_ftrain, "fclassify": _cmd_fclassify,
    "contours": _cmd_contours, "surface": _cmd_surface,
    "ddplot": _cmd_ddplot, "generate": _cmd_generate,
}


# ---------------------------------------------------------------------------
# parser construction
# ---------------------------------------------------------------------------


def _add_common(p) -> None:
    p.add_argument("--config", default=None,
                   help="JSON file supplying any flag; command line wins")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")


def _add_threads(p) -> None:
    p.add_argument("--threads", default=None,
                   help="worker threads (default: all cores, or "
                        "DEPTHCRAFT_THREADS)")


def _add_depth_flags(p, require_notion: bool = True) -> None:
    p.add_argument("--notion", choices=NOTIONS, required=require_notion,
                   default=None if require_notion else "halfspace",
                   help="depth notion")
    p.add_argument("--exact", dest="exact", action="store_const", const=True,
                   default=None, help="force the exact algorithm")
    p.add_argument("--approx", dest="exact", action="store_const", const=False,
                   help="force the approximate algorithm")
    p.add_argument("--mah-estimate", choices=("moment", "mcd", "none"),
                   default="moment", help="scatter estimator")
    p.add_argument("--mcd-fraction", type=float, default=0.75)
    p.add_argument("--num-directions", type=int, default=1000)
    p.add_argument("--simplex-count", type=float, default=1000,
                   help="simplices to draw (count > 1, fraction in (0,1))")
    p.add_argument("--bandwidth", type=float, default=None,
                   help="kernel bandwidth for the local notions")
    p.add_argument("--refine", action="store_true", default=False)
    p.add_argument("--exact-cap", type=int, default=60)
    p.add_argument("--simplex-cap", type=int, default=10 ** 7)


def _add_classifier_flags(p) -> None:
    p.add_argument("--separator", choices=SEPARATOR_KINDS, default="alpha")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--knn-range", type=int, default=None)
    p.add_argument("--cv-folds", type=int, default=10)
    p.add_argument("--aggregation", choices=("majority", "sequent", "none"),
                   default="majority")
    p.add_argument("--outsider-method", default="lda",
                   help="comma-separated treatment methods; first is the "
                        "default answer policy")
    p.add_argument("--use-convex", action="store_true", default=False,
                   help="flag outsiders by convex-hull membership")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="depthcraft",
        description="Data-depth statistics, depth-space classification, "
                    "and functional classification.")
    subs = parser.add_subparsers(dest="command", required=True)
    built = {}

    def sub(name, **kw):
        p = subs.add_parser(name, **kw)
        _add_common(p)
        built[name] = p
        return p

    p = sub("depth", help="depth of query points in a data cloud")
    p.add_argument("--in", required=True, help="data cloud CSV (no labels)")
    p.add_argument("--query", required=True, help="query points CSV")
    _add_depth_flags(p)
    _add_threads(p)

    p = sub("ddspace", help="per-class depths of points")
    p.add_argument("--in", required=True, help="labeled training CSV")
    p.add_argument("--query", default=None,
                   help="points to evaluate (default: the training points)")
    _add_depth_flags(p)
    _add_threads(p)

    p = sub("train", help="train a depth classifier")
    p.add_argument("--in", required=True, help="labeled training CSV")
    p.add_argument("--out", default=None, help="model file to write "
                   "(default: model JSON on stdout)")
    _add_depth_flags(p, require_notion=False)
    _add_classifier_flags(p)
    _add_threads(p)

    p = sub("classify", help="classify points with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", required=True, help="query points CSV")
    p.add_argument("--outsider-method", default=None,
                   help="treatment to answer outsiders with "
                        "(default: the model's default policy)")
    p.set_defaults(seed=None)
    _add_threads(p)

    p = sub("cv", help="cross-validated classification error")
    p.add_argument("--in", required=True, help="labeled CSV")
    p.add_argument("--numchunks", type=int, default=10)
    _add_depth_flags(p, require_notion=False)
    _add_classifier_flags(p)
    _add_threads(p)

    p = sub("partition", help="random train/test split error, repeated")
    p.add_argument("--in", required=True, help="labeled CSV")
    p.add_argument("--size", required=True,
                   help="training size: count (int) or fraction in (0,1)")
    p.add_argument("--times", type=int, default=10)
    _add_depth_flags(p, require_notion=False)
    _add_classifier_flags(p)

    p = sub("bench-maxdepth", help="error of maximum-depth classifiers on "
            "synthetic two-class data")
    p.add_argument("--df", default="inf",
                   help="tail weight: degrees of freedom, or inf for normal")
    p.add_argument("--n", type=int, default=1000, help="training size")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--test-size", type=int, default=1000)
    p.add_argument("--notions", default="mahalanobis,projection",
                   help="comma-separated notion[:estimator] tokens")

    p = sub("bench-time", help="seconds per depth evaluation over a grid "
            "of dimensions and sizes")
    p.add_argument("--notions", default="mahalanobis,zonoid",
                   help="comma-separated notion[:estimator] tokens")
    p.add_argument("--dims", default="2,3", help="comma-separated dimensions")
    p.add_argument("--sizes", default="100,1000", help="comma-separated sizes")
    p.add_argument("--points-per-cell", type=int, default=3)
    p.add_argument("--budget-seconds", type=float, default=60.0)
    p.add_argument("--out", required=True, help="timing CSV file to write")

    p = sub("ftrain", help="train a functional classifier")
    p.add_argument("--in", required=True, help="functional data JSON")
    p.add_argument("--out", default=None, help="model file to write")
    p.add_argument("--classifier", choices=FUNCTIONAL_CLASSIFIERS,
                   default="ddalpha")
    p.add_argument("--num-fcn", type=int, default=-1,
                   help="location pieces L (-1: scan automatically)")
    p.add_argument("--num-der", type=int, default=-1,
                   help="slope pieces S (-1: scan automatically)")
    p.add_argument("--max-num-intervals", type=int, default=None,
                   help="largest L+S the automatic scan may try")
    p.add_argument("--cv-complete", action="store_true", default=False,
                   help="cross-validate every candidate instead of the "
                        "bound-ranked shortlist")
    p.add_argument("--adc-instance", choices=("average", "values"),
                   default="average")
    _add_depth_flags(p, require_notion=False)
    p.add_argument("--separator", choices=SEPARATOR_KINDS, default="alpha")
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--knn-range", type=int, default=None)
    p.add_argument("--cv-folds", type=int, default=10)
    _add_threads(p)

    p = sub("fclassify", help="classify functions with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--in", required=True, help="functional data JSON")

    p = sub("contours", help="depth contour lines of a bivariate cloud")
    p.add_argument("--in", required=True, help="data CSV (2 columns)")
    p.add_argument("--frequency", type=int, default=100, help="grid nodes per axis")
    p.add_argument("--levels", type=float, default=10,
                   help="line count, or a single depth value when <= 1")
    p.add_argument("--svg", default=None, help="SVG file to write")
    _add_depth_flags(p)
    _add_threads(p)

    p = sub("surface", help="depth landscape of a bivariate cloud")
    p.add_argument("--in", required=True, help="data CSV (2 columns)")
    p.add_argument("--xnum", type=int, default=50)
    p.add_argument("--ynum", type=int, default=50)
    p.add_argument("--svg", default=None, help="SVG file to write")
    _add_depth_flags(p)
    _add_threads(p)

    p = sub("ddplot", help="pairwise depth plot of classes")
    p.add_argument("--model", default=None, help="saved model file")
    p.add_argument("--in", default=None, help="labeled CSV (instead of a model)")
    p.add_argument("--no-separation", action="store_true", default=False,
                   help="omit the separation boundary")
    p.add_argument("--svg", default=None, help="SVG file to write")
    _add_depth_flags(p, require_notion=False)
    _add_threads(p)

    p = sub("generate", help="draw a labeled two-class sample")
    p.add_argument("--n-per-class", type=int, required=True)
    p.add_argument("--mu1", default="0,0", help="first mean, comma-separated")
    p.add_argument("--mu2", default="1,1", help="second mean")
    p.add_argument("--sigma", default="1,1;1,4",
                   help="shared covariance, rows separated by ';'")
    p.add_argument("--family", choices=("gaussian", "student-t", "cauchy"),
                   default="gaussian")
    p.add_argument("--df", type=float, default=None,
                   help="degrees of freedom for student-t")

    return parser, built


def _load_config(argv, built) -> dict:
    """Read --config JSON and return {dest: value} for the subcommand."""
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is None:
        return {}
    command = next((t for t in argv if not t.startswith("-")), None)
    if command not in built:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})")
    if not isinstance(data, dict):
        raise FormatError(f"{path}: config must be a JSON object")
    known = {a.dest for a in built[command]._actions}
    out = {}
    for key, value in data.items():
        dest = str(key).replace("-", "_")
        if dest == "config" or dest not in known:
            raise ParameterError(
                f"config key {key!r} is not a flag of `{command}`")
        out[dest] = value
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, built = _build_parser()
    try:
        config = _load_config(argv, built)
        command = next((t for t in argv if not t.startswith("-")), None)
        if config and command in built:
            # Config values become the subcommand's defaults, so explicit
            # command-line flags still win and "required" is satisfied.
            built[command].set_defaults(**config)
            for action in built[command]._actions:
                if action.required and action.dest in config:
                    action.required = False
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except SizeError as exc:
        message = str(exc)
        command = next((t for t in argv if not t.startswith("-")), "")
        if command in _APPROX_COMMANDS and "--approx" not in message:
            message += " (rerun with --approx to use the approximate algorithm)"
        _note(f"error: {message}")
        return 2
    except (ParameterError, FormatError) as exc:
        _note(f"error: {exc}")
        return 2
    except DepthcraftError as exc:
        _note(f"error: {exc}")
        return 1
    except OSError as exc:
        _note(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
