"""Euclidean primitives and the k-means cost in its two equivalent forms.

Points are rows of a float64 array of shape ``(n_points, dim)``.  The code is
dimension-generic; only the data generator is tied to the plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class UsageError(ValueError):
    """Raised when an operation is called outside its preconditions."""


def as_points(points) -> np.ndarray:
    """Coerce ``points`` into a 2-D float64 array and validate it."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise UsageError(f"points must be a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise UsageError("points contain non-finite coordinates")
    return arr


def squared_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    diff = a - b
    return float(diff @ diff)


def sq_dists_to(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Squared distance of every row of ``points`` to one ``center``."""
    diff = points - center
    return np.einsum("ij,ij->i", diff, diff)


def pairwise_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of squared distances, shape ``(len(a), len(b))``.

    Computed from coordinate differences rather than the Gram expansion so
    that exact ties stay exact.
    """
    out = np.zeros((a.shape[0], b.shape[0]))
    for d in range(a.shape[1]):
        diff = a[:, d, None] - b[None, :, d]
        out += diff * diff
    return out


def centroid(points) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[0] == 0:
        raise UsageError("centroid of an empty point set")
    return arr.mean(axis=0)


@dataclass(frozen=True)
class Clustering:
    """A hard partition of point indices into ``k`` groups plus their centroids."""

    assignment: np.ndarray
    centroids: np.ndarray

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == j)

    @classmethod
    def from_assignment(cls, points, assignment, k: int | None = None) -> "Clustering":
        """Build a consistent clustering whose centroids are the group means."""
        pts = as_points(points)
        assignment = np.asarray(assignment, dtype=np.int64)
        if k is None:
            k = int(assignment.max()) + 1
        _check_assignment(pts, assignment, k)
        sizes = np.bincount(assignment, minlength=k)
        if np.any(sizes == 0):
            raise UsageError(f"clusters {np.flatnonzero(sizes == 0).tolist()} are empty")
        sums = np.zeros((k, pts.shape[1]))
        np.add.at(sums, assignment, pts)
        return cls(assignment=assignment, centroids=sums / sizes[:, None])

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "assignment": self.assignment.tolist(),
            "centroids": self.centroids.tolist(),
        }


def _check_assignment(points: np.ndarray, assignment: np.ndarray, k: int) -> None:
    if assignment.shape != (points.shape[0],):
        raise UsageError(
            f"assignment has {assignment.shape} entries for {points.shape[0]} points"
        )
    if k < 1:
        raise UsageError("k must be positive")
    if assignment.size and (assignment.min() < 0 or assignment.max() >= k):
        raise UsageError(f"assignment index outside [0, {k})")


def cost_centroid_form(points, clustering: Clustering) -> float:
    """Sum over points of the squared distance to the mean of their cluster.

    The means are recomputed from the assignment, so stale centroids in
    ``clustering`` do not leak into the cost.
    """
    pts = as_points(points)
    assignment = np.asarray(clustering.assignment, dtype=np.int64)
    k = clustering.k
    _check_assignment(pts, assignment, k)
    sizes = np.bincount(assignment, minlength=k)
    sums = np.zeros((k, pts.shape[1]))
    np.add.at(sums, assignment, pts)
    means = sums / np.maximum(sizes, 1)[:, None]
    diff = pts - means[assignment]
    return float(np.einsum("ij,ij->", diff, diff))


def cost_pairwise_form(points, clustering: Clustering) -> float:
    """Half the size-normalised sum of within-cluster pairwise squared distances."""
    pts = as_points(points)
    assignment = np.asarray(clustering.assignment, dtype=np.int64)
    k = clustering.k
    _check_assignment(pts, assignment, k)
    total = 0.0
    for j in range(k):
        members = pts[assignment == j]
        if len(members) == 0:
            continue
        total += 0.5 * pairwise_sq_dists(members, members).sum() / len(members)
    return float(total)
