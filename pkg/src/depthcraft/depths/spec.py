"""Depth configuration and the depth-space container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError

__all__ = ["DepthSpec", "DepthSpace", "NOTIONS"]

NOTIONS = (
    "mahalanobis",
    "projection",
    "spatial",
    "halfspace",
    "simplicial",
    "simplicial-volume",
    "zonoid",
    "spatial-local",
    "potential",
)

_ESTIMATORS = ("moment", "mcd", "none")
_NEEDS_BANDWIDTH = ("spatial-local", "potential")
_ALLOWS_NONE_ESTIMATOR = ("spatial", "spatial-local")


@dataclass(frozen=True)
class DepthSpec:
    """Which depth to compute and with which knobs.

    Parameters
    ----------
    notion : str
        One of :data:`NOTIONS`.
    estimator : {'moment', 'mcd', 'none'}
        Scatter estimator for the notions that standardize the data.
        ``'none'`` (identity scatter) is only valid for the spatial variants.
    mcd_fraction : float
        Subset fraction for the MCD estimator.
    exact : bool or None
        Force exact (True) or approximate (False) computation. ``None``
        resolves to the notion's natural default: exact everywhere except
        projection, which has no exact algorithm and rejects ``exact=True``.
    num_directions : int
        Direction count for the projection and halfspace approximations.
    simplex_count : float
        Number of random simplices for the approximate simplicial and
        simplicial-volume depths: a count if > 1, a fraction of all simplices
        if in (0, 1).
    bandwidth : float
        Kernel bandwidth, required by spatial-local and potential.
    refine : bool
        Run the local direction refinement for projection depth.
    exact_cap : int
        Size guard for the exact halfspace algorithm at d >= 3.
    simplex_cap : int
        Guard on the number of enumerated simplices for exact simplicial
        computations.
    seed : int
        Seed for every randomized approximation; drawn once and frozen.
    """

    notion: str
    estimator: str = "moment"
    mcd_fraction: float = 0.75
    exact: bool | None = None
    num_directions: int = 1000
    simplex_count: float = 1000
    bandwidth: float | None = None
    refine: bool = False
    exact_cap: int = 60
    simplex_cap: int = 10**7
    seed: int = 0

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise ParameterError(f"unknown `notion` {self.notion!r}; expected one of {NOTIONS}")
        if self.estimator not in _ESTIMATORS:
            raise ParameterError(
                f"`estimator` must be one of {_ESTIMATORS}, got {self.estimator!r}"
            )
        if self.estimator == "none" and self.notion not in _ALLOWS_NONE_ESTIMATOR:
            raise ParameterError(
                f"`estimator='none'` is only valid for spatial variants, not {self.notion!r}"
            )
        if self.notion in _NEEDS_BANDWIDTH:
            if self.bandwidth is None or self.bandwidth <= 0:
                raise ParameterError(
                    f"`bandwidth` must be a positive number for {self.notion!r}"
                )
        elif self.bandwidth is not None:
            raise ParameterError(
                f"`bandwidth` only applies to {_NEEDS_BANDWIDTH}, not {self.notion!r}"
            )
        if self.notion == "projection" and self.exact is True:
            raise ParameterError("projection depth has no exact algorithm; use exact=False")
        if self.num_directions < 1:
            raise ParameterError(f"`num_directions` must be >= 1, got {self.num_directions}")
        if self.simplex_count <= 0 or self.simplex_count == 1:
            raise ParameterError(
                "`simplex_count` must be a count > 1 or a fraction in (0, 1), "
                f"got {self.simplex_count}"
            )
        if not 0.5 < self.mcd_fraction <= 1.0:
            raise ParameterError(
                f"`mcd_fraction` must lie in (0.5, 1], got {self.mcd_fraction}"
            )

    @property
    def wants_exact(self) -> bool:
        """Resolved exact flag (projection never, others default to exact)."""
        if self.exact is None:
            return self.notion != "projection"
        return bool(self.exact)


@dataclass(frozen=True)
class DepthSpace:
    """Per-class depths of every training point.

    ``depths`` has one row per observation and one column per class; entry
    ``(i, j)`` is the depth of observation ``i`` in class ``j + 1``'s cloud.
    Entries lie in [0, 1] for every notion except ``potential``, which is
    only lower-bounded by zero.
    """

    depths: np.ndarray
    cardinalities: np.ndarray
    spec: DepthSpec

    def __post_init__(self):
        dep = np.asarray(self.depths, dtype=float)
        card = np.asarray(self.cardinalities, dtype=int)
        if dep.ndim != 2:
            raise ParameterError("`depths` must be a 2-D array")
        if card.ndim != 1 or card.shape[0] != dep.shape[1]:
            raise ParameterError("`cardinalities` must have one entry per class column")
        if np.any(dep < 0) or not np.all(np.isfinite(dep)):
            raise ParameterError("depth entries must be finite and non-negative")
        if self.spec.notion != "potential" and np.any(dep > 1 + 1e-12):
            raise ParameterError("depth entries must not exceed 1")
        object.__setattr__(self, "depths", dep)
        object.__setattr__(self, "cardinalities", card)

    @property
    def n(self) -> int:
        return self.depths.shape[0]

    @property
    def q(self) -> int:
        return self.depths.shape[1]
