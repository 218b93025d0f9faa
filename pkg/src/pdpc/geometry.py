"""Shared domain types, the priority order and Euclidean helpers.

Point ids are 1-based (``1..n``) at every public boundary. Internally the
arrays are indexed ``0..n-1`` and index ``i`` always denotes id ``i + 1``;
"smaller id" and "smaller index" are therefore the same tie-break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class UsageError(ValueError):
    """Raised for caller mistakes: bad shapes, bad parameters, empty input."""


@dataclass(frozen=True)
class PointSet:
    """An ``n x d`` table of finite float64 coordinates.

    The coordinate array is copied to a read-only C-contiguous buffer at
    construction, so a ``PointSet`` can be shared freely between workers.
    """

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=np.float64, order="C", copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise UsageError(f"coordinates must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise UsageError(f"need n >= 1 and d >= 1, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise UsageError("coordinates must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def ids(self) -> np.ndarray:
        return np.arange(1, self.n + 1, dtype=np.int64)

    def __len__(self):
        return self.n

    def point(self, pid: int) -> np.ndarray:
        """Coordinates of the point with 1-based id ``pid``."""
        return self.coords[pid - 1]


def as_pointset(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


@dataclass(frozen=True)
class DpcParams:
    d_cut: float
    rho_min: float
    delta_min: float

    def __post_init__(self):
        for name in ("d_cut", "rho_min", "delta_min"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise UsageError(f"{name} must be finite, got {v!r}")
        if self.d_cut <= 0:
            raise UsageError(f"d_cut must be > 0, got {self.d_cut}")
        if self.rho_min < 0:
            raise UsageError(f"rho_min must be >= 0, got {self.rho_min}")
        if self.delta_min <= 0:
            raise UsageError(f"delta_min must be > 0, got {self.delta_min}")


@dataclass(frozen=True, order=False)
class PriorityKey:
    """Density with a lexicographic id tie-break.

    ``a > b`` iff ``a.rho > b.rho``, or the densities are equal and
    ``a.id < b.id``. Use ``PriorityKey.lowest()`` as a -inf sentinel.
    """

    rho: float
    id: int

    @staticmethod
    def lowest() -> "PriorityKey":
        return PriorityKey(-math.inf, 2**62)

    def __gt__(self, other: "PriorityKey") -> bool:
        return priority_gt(self, other)

    def __lt__(self, other: "PriorityKey") -> bool:
        return priority_gt(other, self)


def priority_gt(a: PriorityKey, b: PriorityKey) -> bool:
    if a.rho != b.rho:
        return a.rho > b.rho
    return a.id < b.id


def priority_ranks(rho) -> np.ndarray:
    """Rank of every point in descending priority order (0 = highest).

    ``rank[i] < rank[j]`` exactly when point ``i`` has higher priority than
    point ``j``; all kernels compare ranks instead of ``(rho, id)`` pairs.
    """
    rho = np.asarray(rho)
    order = priority_order(rho)
    rank = np.empty(len(rho), dtype=np.int64)
    rank[order] = np.arange(len(rho), dtype=np.int64)
    return rank


def priority_order(rho) -> np.ndarray:
    """Point indices sorted by descending priority."""
    rho = np.asarray(rho)
    idx = np.arange(len(rho), dtype=np.int64)
    # lexsort: last key is primary; stable on index for equal densities
    return np.lexsort((idx, -rho.astype(np.float64))).astype(np.int64)


@dataclass(frozen=True)
class BoundingBox:
    lo: np.ndarray
    hi: np.ndarray = field()

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise UsageError("box corners must be 1-D and of equal length")
        if np.any(lo > hi):
            raise UsageError("box requires lo <= hi in every dimension")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def of(cls, pts) -> "BoundingBox":
        pts = np.asarray(pts, dtype=np.float64)
        return cls(pts.min(axis=0), pts.max(axis=0))

    @property
    def d(self) -> int:
        return self.lo.shape[0]

    def contains(self, p) -> bool:
        p = np.asarray(p, dtype=np.float64)
        return bool(np.all(self.lo <= p) and np.all(p <= self.hi))

    def corners(self) -> np.ndarray:
        d = self.d
        bits = (np.arange(2**d)[:, None] >> np.arange(d)) & 1
        return np.where(bits == 1, self.hi, self.lo)


def sqdist(a, b) -> float:
    """Squared Euclidean distance summed in dimension order.

    Every component of the package (kernels and oracle) accumulates in this
    exact order so that distance ties and radius tests agree bit for bit.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape} vs {b.shape}")
    acc = 0.0
    for x, y in zip(a.tolist(), b.tolist()):
        t = x - y
        acc += t * t
    return acc


def dist(a, b) -> float:
    return math.sqrt(sqdist(a, b))


def farthest_corner(box: BoundingBox, center: Sequence[float]) -> np.ndarray:
    """Corner of ``box`` farthest from ``center``.

    Per dimension: ``hi`` when the center lies strictly below the box
    midpoint, ``lo`` otherwise (so an exact midpoint picks ``lo``).
    """
    c = np.asarray(center, dtype=np.float64)
    if c.shape != box.lo.shape:
        raise UsageError("center dimension does not match box")
    mid = (box.lo + box.hi) / 2
    return np.where(c < mid, box.hi, box.lo)
