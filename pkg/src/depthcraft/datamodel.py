"""Core containers, CSV ingestion, and synthetic two-class generators."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParameterError

__all__ = [
    "DataMatrix",
    "LabeledSample",
    "GeneratorSpec",
    "load_csv",
    "save_csv",
    "generate_two_class",
]


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

class DataMatrix:
    """Immutable matrix of observations, one row per observation.

    Parameters
    ----------
    values : array_like
        Two-dimensional numeric array of shape ``(n, d)`` with ``n >= 1``
        observations and ``d >= 1`` coordinates. Every entry must be finite.
    """

    __slots__ = ("_values",)

    def __init__(self, values) -> None:
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise ParameterError(f"`values` must be 2-dimensional, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError(f"`values` must be at least 1x1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ParameterError(
                f"non-finite entry at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "_values", arr)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("DataMatrix is immutable")

    @property
    def values(self) -> np.ndarray:
        """Read-only ``(n, d)`` array of observations."""
        return self._values

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def d(self) -> int:
        return self._values.shape[1]

    def __repr__(self) -> str:
        return f"DataMatrix(n={self.n}, d={self.d})"


class LabeledSample:
    """A data matrix together with dense integer class labels.

    Labels take values in ``1..q`` and every class is nonempty. The original
    label text (before remapping) is kept in ``label_names`` so output files
    can restore it.
    """

    __slots__ = ("_data", "_labels", "_label_names")

    def __init__(self, data: DataMatrix, labels, label_names=None) -> None:
        if not isinstance(data, DataMatrix):
            data = DataMatrix(data)
        lab = np.asarray(labels)
        if lab.shape != (data.n,):
            raise ParameterError(
                f"`labels` must have shape ({data.n},), got {lab.shape}"
            )
        if not np.issubdtype(lab.dtype, np.integer):
            try:
                asint = lab.astype(int)
            except (TypeError, ValueError):
                raise ParameterError("`labels` must be integers") from None
            if not np.array_equal(asint, lab):
                raise ParameterError("`labels` must be integers")
            lab = asint
        lab = lab.astype(int)
        q = int(lab.max()) if lab.size else 0
        present = np.unique(lab)
        if lab.min() < 1 or not np.array_equal(present, np.arange(1, q + 1)):
            raise ParameterError(
                f"labels must cover 1..q contiguously, got classes {present.tolist()}"
            )
        if label_names is None:
            label_names = tuple(str(j) for j in range(1, q + 1))
        label_names = tuple(str(s) for s in label_names)
        if len(label_names) != q:
            raise ParameterError(
                f"`label_names` must have {q} entries, got {len(label_names)}"
            )
        lab = lab.copy()
        lab.setflags(write=False)
        object.__setattr__(self, "_data", data)
        object.__setattr__(self, "_labels", lab)
        object.__setattr__(self, "_label_names", label_names)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("LabeledSample is immutable")

    @property
    def data(self) -> DataMatrix:
        return self._data

    @property
    def labels(self) -> np.ndarray:
        """Read-only length-``n`` vector with values in ``1..q``."""
        return self._labels

    @property
    def label_names(self) -> tuple:
        return self._label_names

    @property
    def n(self) -> int:
        return self._data.n

    @property
    def d(self) -> int:
        return self._data.d

    @property
    def q(self) -> int:
        return len(self._label_names)

    @property
    def cardinalities(self) -> np.ndarray:
        """Per-class counts ``n_1..n_q`` (recomputed from the labels)."""
        return np.bincount(self._labels, minlength=self.q + 1)[1:]

    def class_rows(self, j: int) -> np.ndarray:
        """Rows of class ``j`` (1-based) as a read-only array."""
        if not 1 <= j <= self.q:
            raise ParameterError(f"class index {j} outside 1..{self.q}")
        return self._data.values[self._labels == j]

    def __repr__(self) -> str:
        counts = ",".join(str(c) for c in self.cardinalities)
        return f"LabeledSample(n={self.n}, d={self.d}, q={self.q}, counts=[{counts}])"


# ---------------------------------------------------------------------------
# generator spec
# ---------------------------------------------------------------------------

_FAMILIES = ("student-t", "gaussian", "cauchy")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a two-class elliptical location-shift model.

    ``family`` selects the radial law: ``gaussian`` is the same as
    ``student-t`` with infinite degrees of freedom, ``cauchy`` the same as
    ``student-t`` with ``df = 1``. ``sigma`` is the common scale matrix.
    """

    mu1: tuple = (0.0, 0.0)
    mu2: tuple = (1.0, 1.0)
    sigma: tuple = ((1.0, 1.0), (1.0, 4.0))
    family: str = "gaussian"
    df: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ParameterError(
                f"`family` must be one of {_FAMILIES}, got {self.family!r}"
            )
        df = self.df
        if self.family == "gaussian":
            if df is not None and not math.isinf(df):
                raise ParameterError("`family='gaussian'` requires df = infinity")
            df = math.inf
        elif self.family == "cauchy":
            if df is not None and df != 1:
                raise ParameterError("`family='cauchy'` requires df = 1")
            df = 1.0
        else:
            if df is None:
                raise ParameterError("`family='student-t'` requires `df`")
            df = float(df)
            if df <= 0:
                raise ParameterError(f"`df` must be positive, got {df}")
        object.__setattr__(self, "df", df)

        mu1 = np.asarray(self.mu1, dtype=float).ravel()
        mu2 = np.asarray(self.mu2, dtype=float).ravel()
        sigma = np.asarray(self.sigma, dtype=float)
        if mu1.shape != mu2.shape:
            raise ParameterError("`mu1` and `mu2` must have the same length")
        d = mu1.size
        if sigma.shape != (d, d):
            raise ParameterError(
                f"`sigma` must be {d}x{d} to match the locations, got {sigma.shape}"
            )
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise ParameterError("`sigma` must be symmetric")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise ParameterError("`sigma` must be positive definite") from None
        object.__setattr__(self, "mu1", tuple(mu1))
        object.__setattr__(self, "mu2", tuple(mu2))
        object.__setattr__(self, "sigma", tuple(map(tuple, sigma)))

    @property
    def dim(self) -> int:
        return len(self.mu1)


# ---------------------------------------------------------------------------
# CSV input/output
# ---------------------------------------------------------------------------

def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise FormatError(
            f"cell at row {row}, column {col} is not numeric: {text!r}"
        ) from None
    if not math.isfinite(value):
        raise FormatError(f"cell at row {row}, column {col} is not finite: {text!r}")
    return value


def _is_numeric_row(fields) -> bool:
    for f in fields:
        try:
            float(f)
        except ValueError:
            return False
    return True


def load_csv(path, label_column: str = "last"):
    """Read a rectangular comma-separated table.

    Parameters
    ----------
    path : str or path-like
        File to read. An optional header row is detected by the first row
        containing any non-numeric field outside the label column.
    label_column : {'last', 'none'}
        ``'last'`` treats the rightmost column as class labels, remapped to
        ``1..q`` in first-occurrence order; ``'none'`` reads every column as a
        feature and returns a plain :class:`DataMatrix`.

    Returns
    -------
    LabeledSample or DataMatrix
    """
    if label_column not in ("last", "none"):
        raise ParameterError(
            f"`label_column` must be 'last' or 'none', got {label_column!r}"
        )
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise FormatError(f"{path}: empty file")

    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise FormatError(
                f"row {i + 1} has {len(r)} fields, expected {width} (ragged table)"
            )

    # Header detection: the first row counts as a header when any of its
    # feature fields fails to parse as a number.
    feat_cols = width - 1 if label_column == "last" else width
    if feat_cols < 1:
        raise FormatError("table needs at least one feature column")
    start = 0
    if not _is_numeric_row(rows[0][:feat_cols]):
        start = 1
        if len(rows) == 1:
            raise FormatError(f"{path}: no data rows after the header")

    values = np.empty((len(rows) - start, feat_cols))
    for i, r in enumerate(rows[start:]):
        for j in range(feat_cols):
            values[i, j] = _parse_cell(r[j].strip(), start + i + 1, j + 1)

    if label_column == "none":
        return DataMatrix(values)

    raw = [r[-1].strip() for r in rows[start:]]
    order: dict = {}
    for s in raw:
        if s not in order:
            order[s] = len(order) + 1
    labels = np.array([order[s] for s in raw], dtype=int)
    return LabeledSample(DataMatrix(values), labels, tuple(order.keys()))


def save_csv(obj, path) -> None:
    """Write a :class:`DataMatrix` or :class:`LabeledSample` back to CSV.

    Floats are written with ``repr`` (shortest round-trip text), labels with
    their original names in the last column. No header row is written.
    """
    if isinstance(obj, LabeledSample):
        values = obj.data.values
        names = [obj.label_names[l - 1] for l in obj.labels]
    elif isinstance(obj, DataMatrix):
        values = obj.values
        names = None
    else:
        raise ParameterError(
            f"expected DataMatrix or LabeledSample, got {type(obj).__name__}"
        )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i in range(values.shape[0]):
            row = [repr(float(v)) for v in values[i]]
            if names is not None:
                row.append(names[i])
            writer.writerow(row)


# ---------------------------------------------------------------------------
# synthetic data
# ---------------------------------------------------------------------------

def generate_two_class(spec: GeneratorSpec, n_per_class: int, rng=None) -> LabeledSample:
    """Draw a balanced two-class sample from the elliptical shift model.

    Each class is ``mu_i + L z`` where ``L`` is the Cholesky factor of
    ``sigma`` and ``z`` is spherically t-distributed with ``spec.df``
    degrees of freedom (Gaussian for ``df = inf``). The per-class draw order
    is the Gaussian block first, then the chi-square mixing variables, so the
    infinite-df path consumes exactly the Gaussian stream.
    """
    if n_per_class < 1:
        raise ParameterError(f"`n_per_class` must be >= 1, got {n_per_class}")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    d = spec.dim
    chol = np.linalg.cholesky(np.asarray(spec.sigma))
    blocks = []
    for mu in (spec.mu1, spec.mu2):
        g = rng.standard_normal((n_per_class, d))
        if math.isfinite(spec.df):
            w = rng.chisquare(spec.df, n_per_class)
            g = g / np.sqrt(w / spec.df)[:, None]
        blocks.append(np.asarray(mu) + g @ chol.T)
    values = np.vstack(blocks)
    labels = np.repeat([1, 2], n_per_class)
    return LabeledSample(DataMatrix(values), labels, ("1", "2"))
