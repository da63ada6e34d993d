"""Conic partitions of standard-Gaussian space with exact bin probabilities.

Each bin is a cone (a union of half-lines from the origin), so
membership depends only on direction: ``classify(c * x) == classify(x)``
for every c > 0. Bin probabilities are analytical, never estimated.
Points that land exactly on a cut are assigned deterministically to the
bin on the non-strict (>=) side.

Bin indices are 0-based throughout the library; file outputs label the
columns 1..J.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class Partition:
    """A map from points to bin indices with known bin probabilities."""

    kind: str
    dimension: int
    probs: np.ndarray
    classify_batch: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    @property
    def n_bins(self) -> int:
        return len(self.probs)

    def classify(self, points):
        """Bin index of a point (int) or of each row of an (N, n) array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            return int(self.classify_batch(pts[None, :])[0])
        return self.classify_batch(pts)


def make_single_bin(dimension: int) -> Partition:
    """The trivial partition: one bin covering the whole space."""
    if dimension < 1:
        raise ConfigurationError("dimension must be at least 1")
    return Partition(
        "single",
        dimension,
        np.array([1.0]),
        lambda pts: np.zeros(pts.shape[0], dtype=np.int64),
    )


def make_angular_sectors_2d(cuts) -> Partition:
    """Partition the plane into angular sectors between consecutive cut angles.

    Parameters
    ----------
    cuts : sequence of float
        Strictly increasing angles in (-pi, pi], at least two. Sector j
        spans [cuts[j], cuts[j+1]); the last sector wraps from the final
        cut through +/-pi back to the first. Sector probabilities are
        angular widths over 2*pi, by rotational symmetry of the
        standard Gaussian.
    """
    cuts = np.asarray(cuts, dtype=float)
    if cuts.size < 2:
        raise ConfigurationError("angular partition needs at least 2 cut angles")
    if np.any(np.diff(cuts) <= 0):
        raise ConfigurationError("cut angles must be strictly increasing")
    if cuts[0] <= -math.pi or cuts[-1] > math.pi:
        raise ConfigurationError("cut angles must lie in (-pi, pi]")

    widths = np.empty(cuts.size)
    widths[:-1] = np.diff(cuts)
    widths[-1] = 2.0 * math.pi - (cuts[-1] - cuts[0])
    probs = widths / widths.sum()

    def _classify(pts: np.ndarray) -> np.ndarray:
        ang = np.arctan2(pts[:, 1], pts[:, 0])
        idx = np.searchsorted(cuts, ang, side="right") - 1
        idx[idx < 0] = cuts.size - 1  # below the first cut -> wrap-around sector
        return idx.astype(np.int64)

    return Partition("angular", 2, probs, _classify)


def make_halfspace(axis: int, dimension: int) -> Partition:
    """Two bins split by the sign of coordinate ``axis`` (1-based, as in theta_1).

    Bin 0 is the negative side, bin 1 the non-negative side (boundary
    points go to bin 1).
    """
    if not 1 <= axis <= dimension:
        raise ConfigurationError(
            f"axis must be between 1 and the dimension {dimension}, got {axis}"
        )
    col = axis - 1
    return Partition(
        "halfspace",
        dimension,
        np.array([0.5, 0.5]),
        lambda pts: (pts[:, col] >= 0.0).astype(np.int64),
    )


def make_orthants(dimension: int) -> Partition:
    """All 2**n orthants by coordinate signs; boundary planes go to the >= side."""
    if dimension < 1:
        raise ConfigurationError("dimension must be at least 1")
    if dimension > 30:
        raise ConfigurationError(
            f"orthant partition of dimension {dimension} would need 2**{dimension} bins"
        )
    n_bins = 2**dimension
    weights = (2 ** np.arange(dimension)).astype(np.int64)

    def _classify(pts: np.ndarray) -> np.ndarray:
        return (pts >= 0.0).astype(np.int64) @ weights

    return Partition("orthants", dimension, np.full(n_bins, 1.0 / n_bins), _classify)


def from_spec(kind: str, dimension: int, cuts=None, axis: int | None = None) -> Partition:
    """Build a partition from its declarative description (CLI configs)."""
    if kind == "single":
        return make_single_bin(dimension)
    if kind == "angular":
        if dimension != 2:
            raise ConfigurationError("angular partitions are two-dimensional")
        if cuts is None:
            raise ConfigurationError("angular partition requires a 'cuts' list")
        return make_angular_sectors_2d(cuts)
    if kind == "halfspace":
        if axis is None:
            raise ConfigurationError("halfspace partition requires an 'axis'")
        return make_halfspace(axis, dimension)
    if kind == "orthants":
        return make_orthants(dimension)
    raise ConfigurationError(
        f"unknown partition kind {kind!r} (known: single, angular, halfspace, orthants)"
    )
