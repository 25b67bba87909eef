"""Ambient-space primitives: distances, bounding boxes, rescaling, and an
exact nearest-two index over a point set that mutates as units move.

Points live in R^d with d in {2, 3, 4}.  All distance comparisons in this
module are made on squared distances accumulated coordinate by coordinate,
left to right, so the vectorized index and the scalar scan below order
candidates identically, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

SUPPORTED_DIMS = (2, 3, 4)


def as_point(p, dim: int | None = None) -> np.ndarray:
    """Validate and convert `p` to a float64 coordinate array."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.shape[0] not in SUPPORTED_DIMS:
        raise ValueError(f"point must have 2, 3 or 4 coordinates, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"point has non-finite coordinates: {arr!r}")
    return arr


def squared_distance(a, b) -> float:
    """Squared Euclidean distance, accumulated left to right."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    acc = 0.0
    for x, y in zip(a, b):
        d = x - y
        acc += d * d
    return float(acc)


def distance(a, b) -> float:
    """Euclidean distance between two points of equal dimension."""
    return math.sqrt(squared_distance(a, b))


def nearest_two(points, query) -> tuple[int, int]:
    """Ids of the closest and second-closest point to `query`.

    `points` is a mapping id -> point or a sequence (ids are positions).
    Ties are broken toward the smallest id.  This is the reference scan;
    `PointIndex.nearest_two` must agree with it exactly.
    """
    if isinstance(points, Mapping):
        items = sorted(points.items())
    else:
        items = list(enumerate(points))
    if len(items) < 2:
        raise ValueError("nearest_two requires at least 2 points")
    best_id = second_id = -1
    best_d = second_d = math.inf
    for uid, p in items:
        d = squared_distance(p, query)
        if d < best_d:
            second_id, second_d = best_id, best_d
            best_id, best_d = uid, d
        elif d < second_d:
            second_id, second_d = uid, d
    return best_id, second_id


@dataclass(frozen=True)
class BoundingBox:
    min_corner: np.ndarray
    max_corner: np.ndarray

    @property
    def extent(self) -> np.ndarray:
        return self.max_corner - self.min_corner

    @property
    def major_size(self) -> float:
        return float(self.extent.max())

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min_corner + self.max_corner)


def bounding_box(points) -> BoundingBox:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("bounding_box needs a nonempty (n, d) array of points")
    return BoundingBox(arr.min(axis=0), arr.max(axis=0))


@dataclass(frozen=True)
class RescaleResult:
    points: np.ndarray
    scale: float
    degenerate: bool


def rescale_to_major(points, major: float) -> RescaleResult:
    """Uniformly scale and translate so the longest bounding-box edge equals
    `major`, with the box centered at the origin.

    Aspect ratios are preserved.  A degenerate input (all points identical)
    is returned unchanged with the `degenerate` flag set.
    """
    if major <= 0:
        raise ValueError("major must be positive")
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("rescale_to_major needs a nonempty (n, d) array")
    box = bounding_box(arr)
    longest = box.major_size
    if longest == 0.0:
        return RescaleResult(arr.copy(), 1.0, True)
    scale = major / longest
    return RescaleResult((arr - box.center) * scale, scale, False)


class PointIndex:
    """Mutable id -> position store with exact nearest-two queries.

    Backed by a row matrix scanned with vectorized arithmetic; insert,
    remove and move are O(1).  Query results (including the smallest-id
    tie-break) are bit-identical to the `nearest_two` scan above.

    Reads are safe from several threads; any mutation requires exclusive
    access.  Row views returned by `get` stay valid until the next insert.
    """

    def __init__(self, dim: int, capacity: int = 64):
        if dim not in SUPPORTED_DIMS:
            raise ValueError(f"dim must be one of {SUPPORTED_DIMS}")
        self.dim = dim
        self._m = np.zeros((capacity, dim), dtype=float)
        self._ids = np.full(capacity, -1, dtype=np.int64)
        self._row_of: dict[int, int] = {}
        self._free = list(range(capacity - 1, -1, -1))

    def __len__(self) -> int:
        return len(self._row_of)

    def __contains__(self, uid: int) -> bool:
        return uid in self._row_of

    def ids(self) -> Iterable[int]:
        return self._row_of.keys()

    def _grow(self) -> None:
        old = self._m.shape[0]
        new = old * 2
        m = np.zeros((new, self.dim), dtype=float)
        m[:old] = self._m
        ids = np.full(new, -1, dtype=np.int64)
        ids[:old] = self._ids
        self._m, self._ids = m, ids
        self._free.extend(range(new - 1, old - 1, -1))

    def insert(self, uid: int, pos) -> np.ndarray:
        if uid in self._row_of:
            raise KeyError(f"id {uid} already present")
        p = as_point(pos, self.dim)
        if not self._free:
            self._grow()
        row = self._free.pop()
        self._m[row] = p
        self._ids[row] = uid
        self._row_of[uid] = row
        return self._m[row]

    def remove(self, uid: int) -> None:
        row = self._row_of.pop(uid)
        self._ids[row] = -1
        self._m[row] = 0.0
        self._free.append(row)

    def get(self, uid: int) -> np.ndarray:
        """Writable view of the stored position (valid until next insert)."""
        return self._m[self._row_of[uid]]

    def move(self, uid: int, pos) -> None:
        self._m[self._row_of[uid]] = as_point(pos, self.dim)

    def pull_toward(self, ids, target, factors) -> None:
        """Move each listed point toward `target` by its own factor,
        in place: p += factor * (target - p)."""
        rows = [self._row_of[u] for u in ids]
        m = self._m
        m[rows] += np.asarray(factors, dtype=float)[:, None] * (target - m[rows])

    def positions(self) -> dict[int, np.ndarray]:
        return {uid: self._m[row].copy() for uid, row in self._row_of.items()}

    def nearest_two(self, query) -> tuple[int, int]:
        """Ids of the two stored points closest to `query`.

        Ties broken by smallest id, exactly as in the scan oracle.
        """
        if len(self._row_of) < 2:
            raise ValueError("nearest_two requires at least 2 points")
        q = np.asarray(query, dtype=float)
        diff = self._m - q
        d2 = diff[:, 0] ** 2
        for k in range(1, self.dim):
            d2 += diff[:, k] ** 2
        d2[self._ids < 0] = math.inf
        m1 = d2.min()
        best = int(self._ids[d2 == m1].min())
        d2[self._row_of[best]] = math.inf
        m2 = d2.min()
        second = int(self._ids[d2 == m2].min())
        return best, second
