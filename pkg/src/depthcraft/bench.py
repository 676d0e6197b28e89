"""Error-rate and timing harnesses for the depth classifiers.

Three evaluation protocols (holdout, stride cross-validation, repeated
random partitioning) plus two experiment drivers: the max-depth error study
on elliptical location-shift data and a per-point depth timing sweep. All
harness outputs are pure functions of (data, config, seed); wall-clock
numbers are reported separately so the deterministic payload stays stable.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import TrainedModel, classify, outsider_flags, train
from .datamodel import DataMatrix, GeneratorSpec, LabeledSample, generate_two_class
from .depths.api import depth
from .depths.spec import DepthSpec
from .depths.zonoid import in_convex_hull
from .errors import ParameterError, SizeError
from .outsiders import IGNORED
from .separators import SeparatorSpec

__all__ = [
    "BenchConfig",
    "HoldoutReport",
    "holdout_test",
    "cv_error",
    "partition_error",
    "maxdepth_experiment",
    "time_depths",
    "write_rows_csv",
    "write_summary_json",
]


# ---------------------------------------------------------------------------
# classifier configuration shared by the protocols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchConfig:
    """Training and classification settings used by every protocol.

    ``policy`` names the outsider treatment consulted at classification
    time; None falls back to the first trained policy.
    """

    depth_spec: DepthSpec | None = None
    separator_spec: SeparatorSpec | None = None
    aggregation: str = "majority"
    outsider_policies: tuple | None = None
    use_convex: bool = False
    policy: str | None = None
    seed: int = 0
    threads: int = 1


def _fit(sample: LabeledSample, config: BenchConfig) -> TrainedModel:
    return train(sample, config.depth_spec, config.separator_spec,
                 config.aggregation, config.outsider_policies,
                 config.use_convex, config.seed, config.threads)


def _truth_indices(learn_names, test: LabeledSample) -> np.ndarray:
    """Test labels re-expressed in the learn sample's 1-based class indices."""
    lookup = {name: j + 1 for j, name in enumerate(learn_names)}
    out = np.empty(test.n, dtype=int)
    for i, lab in enumerate(test.labels):
        name = test.label_names[lab - 1]
        if name not in lookup:
            raise ParameterError(
                f"test label {name!r} does not occur in the learn sample")
        out[i] = lookup[name]
    return out


def _score(predicted, truth) -> tuple[int, int, int]:
    """(correct, incorrect, ignored) counts over one prediction batch."""
    correct = incorrect = ignored = 0
    for got, want in zip(predicted, truth):
        if got == IGNORED:
            ignored += 1
        elif got == want:
            correct += 1
        else:
            incorrect += 1
    return correct, incorrect, ignored


# ---------------------------------------------------------------------------
# holdout
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoldoutReport:
    """Outcome of one learn/test split.

    ``error_rate`` divides by the decided points only: ignored outsiders
    are excluded from the denominator and reported separately. The
    ``outsiders`` count covers every test point flagged as an outsider,
    whether its treatment then decided it or ignored it.
    """

    error_rate: float
    correct: int
    incorrect: int
    ignored: int
    outsiders: int
    n_test: int
    train_seconds: float


def holdout_test(learn: LabeledSample, test: LabeledSample,
                 config: BenchConfig | None = None) -> HoldoutReport:
    """Train on one sample and score on another."""
    config = config if config is not None else BenchConfig()
    if learn.d != test.d:
        raise ParameterError(
            f"learn and test dimensions differ: {learn.d} vs {test.d}")
    truth = _truth_indices(learn.label_names, test)

    start = time.perf_counter()
    model = _fit(learn, config)
    train_seconds = time.perf_counter() - start

    predicted = classify(model, test.data.values, policy=config.policy,
                         threads=config.threads)
    flags = outsider_flags(model, test.data.values, threads=config.threads)
    correct, incorrect, ignored = _score(predicted, truth)
    decided = test.n - ignored
    return HoldoutReport(error_rate=incorrect / decided if decided else 0.0,
                         correct=correct, incorrect=incorrect, ignored=ignored,
                         outsiders=int(np.sum(flags)), n_test=test.n,
                         train_seconds=train_seconds)


# ---------------------------------------------------------------------------
# stride cross-validation
# ---------------------------------------------------------------------------


def cv_error(sample: LabeledSample, numchunks: int,
             config: BenchConfig | None = None) -> float:
    """Cross-validation error with stride folds.

    Fold ``i`` holds out observations ``i, i + numchunks, ...``, so
    ``numchunks = n`` is leave-one-out. A fold whose training part loses a
    class entirely is skipped with a warning. The error divides by the
    points actually decided (skipped folds and ignored outsiders are
    excluded from the denominator).
    """
    config = config if config is not None else BenchConfig()
    n = sample.n
    if not 2 <= numchunks <= n:
        raise ParameterError(f"`numchunks` must lie in [2, {n}], got {numchunks}")
    x = sample.data.values
    y = sample.labels

    incorrect = 0
    scored = 0
    for fold in range(numchunks):
        hold = np.arange(fold, n, numchunks)
        keep = np.setdiff1d(np.arange(n), hold)
        if np.unique(y[keep]).size < sample.q:
            warnings.warn(f"fold {fold} removes a whole class; skipped",
                          stacklevel=2)
            continue
        model = _fit(LabeledSample(DataMatrix(x[keep]), y[keep],
                                   sample.label_names), config)
        predicted = classify(model, x[hold], policy=config.policy,
                             threads=config.threads)
        _, wrong, ignored = _score(predicted, y[hold])
        incorrect += wrong
        scored += hold.size - ignored
    return incorrect / scored if scored else 0.0


# ---------------------------------------------------------------------------
# repeated random partitioning
# ---------------------------------------------------------------------------


def partition_error(sample: LabeledSample, size, times: int,
                    config: BenchConfig | None = None):
    """Repeatedly hold out a random subset and score on it.

    ``size`` is the test-subset size: a fraction of ``n`` when in (0, 1),
    a count otherwise. Draws that would erase a class from the training
    part are redrawn (at most 1000 tries per round). Returns
    ``(errors, mean, sd, time_mean, time_sd)`` where the errors vector has
    one entry per round and the times measure training; the standard
    deviations use ``ddof=1`` when ``times > 1``.
    """
    config = config if config is not None else BenchConfig()
    n = sample.n
    if isinstance(size, float) and 0.0 < size < 1.0:
        count = int(round(size * n))
    else:
        count = int(size)
    if not 0 < count < n:
        raise ParameterError(
            f"`size` must leave a nonempty train and test part, got {count} of {n}")
    if times < 1:
        raise ParameterError(f"`times` must be >= 1, got {times}")

    rng = np.random.default_rng(config.seed)
    x = sample.data.values
    y = sample.labels

    errors = np.empty(times)
    seconds = np.empty(times)
    for r in range(times):
        for _ in range(1000):
            hold = rng.choice(n, size=count, replace=False)
            keep = np.setdiff1d(np.arange(n), hold)
            if np.unique(y[keep]).size == sample.q:
                break
        else:
            raise SizeError("could not draw a partition keeping every class "
                            "in the training part (1000 tries)")
        start = time.perf_counter()
        model = _fit(LabeledSample(DataMatrix(x[keep]), y[keep],
                                   sample.label_names), config)
        seconds[r] = time.perf_counter() - start
        predicted = classify(model, x[hold], policy=config.policy,
                             threads=config.threads)
        _, wrong, ignored = _score(predicted, y[hold])
        decided = hold.size - ignored
        errors[r] = wrong / decided if decided else 0.0

    ddof = 1 if times > 1 else 0
    return (errors, float(errors.mean()), float(errors.std(ddof=ddof)),
            float(seconds.mean()), float(seconds.std(ddof=ddof)))


# ---------------------------------------------------------------------------
# max-depth error experiment on the elliptical shift model
# ---------------------------------------------------------------------------


def _sample_inside_hull(gen: GeneratorSpec, hull_points: np.ndarray, count: int,
                        rng, max_attempts: int = 10**6):
    """Draw labeled points from the shift model, keeping hull members only."""
    xs, ys = [], []
    got = 0
    attempts = 0
    batch = max(64, count // 4)
    while got < count:
        if attempts >= max_attempts:
            raise SizeError(
                f"rejection sampling stalled: {attempts} draws produced only "
                f"{got} of {count} points inside the hull")
        block = generate_two_class(gen, batch, rng=rng)
        attempts += block.n
        inside = in_convex_hull(block.data.values, hull_points)
        xs.append(block.data.values[inside])
        ys.append(block.labels[inside])
        got += int(np.sum(inside))
    x = np.vstack(xs)[:count]
    y = np.concatenate(ys)[:count]
    return x, y


def maxdepth_experiment(df: float, n: int, depth_specs: dict, reps: int,
                        test_size: int = 1000,
                        generator: GeneratorSpec | None = None,
                        seed: int = 0) -> list[dict]:
    """Average error of the max-depth rule over repeated draws.

    Each repetition draws a balanced training sample of ``n`` points from
    the two-class elliptical shift model with ``df`` tail weight (inf is
    Gaussian), trains one max-depth classifier per entry of
    ``depth_specs`` (name -> DepthSpec), and scores it on ``test_size``
    fresh points rejection-sampled inside the convex hull of the training
    set. Returns one row per depth with the mean and standard deviation of
    the error across repetitions.
    """
    if reps < 1:
        raise ParameterError(f"`reps` must be >= 1, got {reps}")
    if generator is None:
        family = "gaussian" if math.isinf(df) else "student-t"
        generator = GeneratorSpec(family=family,
                                  df=None if math.isinf(df) else df)
    rng = np.random.default_rng(seed)

    errors = {name: np.empty(reps) for name in depth_specs}
    for r in range(reps):
        learn = generate_two_class(generator, n // 2, rng=rng)
        tx, ty = _sample_inside_hull(generator, learn.data.values, test_size, rng)
        for name, spec in depth_specs.items():
            model = train(learn, spec, SeparatorSpec(kind="maxdepth"), seed=seed)
            predicted = classify(model, tx)
            got = np.asarray([0 if v == IGNORED else v for v in predicted])
            errors[name][r] = float(np.mean(got != ty))

    rows = []
    for name in depth_specs:
        e = errors[name]
        rows.append({"depth": name, "df": df, "n": n, "reps": reps,
                     "test_size": test_size,
                     "mean_error": float(e.mean()),
                     "sd_error": float(e.std(ddof=1 if reps > 1 else 0))})
    return rows


# ---------------------------------------------------------------------------
# per-point depth timing
# ---------------------------------------------------------------------------


def time_depths(depth_specs: dict, dims, sizes, points_per_cell: int = 3,
                budget_seconds: float = 60.0, seed: int = 0) -> list[dict]:
    """Wall-clock time of single-point depth calls on random Gaussian clouds.

    Every (depth, d, n) cell times ``points_per_cell`` fresh queries, each
    as the median of 3 repetitions of a full depth call (statistics are not
    shared between calls, matching standalone usage). A cell that overruns
    ``budget_seconds`` is cut short and marked incomplete; cells run
    strictly sequentially. Times are hardware-bound: treat them as
    relative, not reproducible, numbers.
    """
    if points_per_cell < 1:
        raise ParameterError(f"`points_per_cell` must be >= 1, got {points_per_cell}")
    rows = []
    for name, spec in depth_specs.items():
        for d in dims:
            for n in sizes:
                rng = np.random.default_rng([seed, d, n])
                cloud = rng.standard_normal((n, d))
                queries = rng.standard_normal((points_per_cell, d))
                per_point = []
                status = "ok"
                cell_start = time.perf_counter()
                for z in queries:
                    reps = []
                    for _ in range(3):
                        t0 = time.perf_counter()
                        depth(z, cloud, spec)
                        reps.append(time.perf_counter() - t0)
                        if time.perf_counter() - cell_start > budget_seconds:
                            break
                    per_point.append(float(np.median(reps)))
                    if time.perf_counter() - cell_start > budget_seconds:
                        status = "incomplete" if len(per_point) < points_per_cell \
                            or len(reps) < 3 else status
                        break
                rows.append({"depth": name, "d": d, "n": n,
                             "seconds_per_point": float(np.mean(per_point)),
                             "points_timed": len(per_point), "status": status})
    return rows


# ---------------------------------------------------------------------------
# report files
# ---------------------------------------------------------------------------


def write_rows_csv(rows: list[dict], path) -> None:
    """Write homogeneous report rows as CSV with a header."""
    if not rows:
        raise ParameterError("`rows` must not be empty")
    fields = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def write_summary_json(summary: dict, path) -> None:
    """Write a report summary as indented JSON."""
    Path(path).write_text(json.dumps(summary, indent=1), encoding="utf-8")
