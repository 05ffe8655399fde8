"""The Lloyd iteration: assign to the nearest centroid, move centroids to the
means, repeat until the assignment stops changing."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Clustering, UsageError, as_points, cost_centroid_form, pairwise_sq_dists

MONOTONE_SLACK = 1e-9


class InvariantError(RuntimeError):
    """An internal guarantee of the algorithm was violated."""


@dataclass(frozen=True)
class LloydConfig:
    max_iters: int = 100
    empty_cluster_policy: str = "reseed_farthest"

    def __post_init__(self):
        if self.max_iters < 1:
            raise UsageError("max_iters must be >= 1")
        if self.empty_cluster_policy != "reseed_farthest":
            raise UsageError(f"unknown empty cluster policy {self.empty_cluster_policy!r}")


@dataclass(frozen=True)
class LloydResult:
    clustering: Clustering
    cost: float
    iterations: int
    converged: bool
    cost_trace: list = field(default_factory=list)
    reseeds: int = 0

    def monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        t = self.cost_trace
        return all(b <= a + slack for a, b in zip(t, t[1:]))

    def to_dict(self) -> dict:
        return {
            "cost": self.cost,
            "iterations": self.iterations,
            "converged": self.converged,
            "reseeds": self.reseeds,
            "cost_trace": list(self.cost_trace),
            "clustering": self.clustering.to_dict(),
        }


def assign(points, centroids) -> np.ndarray:
    """Index of the nearest centroid for each point; ties go to the lower index."""
    pts = as_points(points)
    cents = np.asarray(centroids, dtype=np.float64).reshape(-1, pts.shape[1])
    if len(cents) == 0:
        raise UsageError("need at least one centroid")
    return np.argmin(pairwise_sq_dists(pts, cents), axis=1)


def update(points, assignment, k: int) -> np.ndarray:
    """Per-cluster arithmetic means."""
    pts = as_points(points)
    sizes = np.bincount(assignment, minlength=k)
    if np.any(sizes == 0):
        raise UsageError(f"cannot update empty clusters {np.flatnonzero(sizes == 0).tolist()}")
    sums = np.zeros((k, pts.shape[1]))
    np.add.at(sums, assignment, pts)
    return sums / sizes[:, None]


def _repair_empty(pts, assignment, centroids):
    """Give each empty cluster the point farthest from its own centroid.

    Donors must keep at least one point.  Returns the number of reseeds.
    """
    k = len(centroids)
    sizes = np.bincount(assignment, minlength=k)
    empties = np.flatnonzero(sizes == 0)
    if len(empties) == 0:
        return 0
    d2 = ((pts - centroids[assignment]) ** 2).sum(axis=1)
    for j in empties:
        eligible = sizes[assignment] > 1
        if not eligible.any():
            raise UsageError("fewer points than clusters")
        cand = np.where(eligible, d2, -1.0)
        p = int(np.argmax(cand))
        sizes[assignment[p]] -= 1
        assignment[p] = j
        sizes[j] = 1
        centroids[j] = pts[p]
        d2[p] = 0.0
    return len(empties)


def _potential(pts, assignment, centroids) -> float:
    diff = pts - centroids[assignment]
    return float(np.einsum("ij,ij->", diff, diff))


def run(points, seeds, cfg: LloydConfig | None = None) -> LloydResult:
    """Run the iteration from ``seeds`` (a SeedSet or an array of centroids).

    ``cost_trace`` starts with the seed potential and then holds the cost after
    every centroid update; it never increases.
    """
    cfg = cfg or LloydConfig()
    pts = as_points(points)
    cents = getattr(seeds, "centroids", seeds)
    cents = np.array(cents, dtype=np.float64).reshape(-1, pts.shape[1])
    k = len(cents)
    if k < 1:
        raise UsageError("need at least one seed")
    if k > len(pts):
        raise UsageError(f"k={k} exceeds the {len(pts)} points")

    current = None
    trace = []
    reseeds = 0
    converged = False
    iterations = 0
    for _ in range(cfg.max_iters):
        new = assign(pts, cents)
        reseeds += _repair_empty(pts, new, cents)
        if current is not None and np.array_equal(new, current):
            converged = True
            cents = update(pts, current, k)  # a reseed may have moved a centroid
            break
        if current is None:
            trace.append(_potential(pts, new, cents))
        current = new
        cents = update(pts, current, k)
        trace.append(_potential(pts, current, cents))
        iterations += 1
    else:
        probe = assign(pts, cents)
        converged = bool(np.array_equal(probe, current))

    clustering = Clustering(assignment=current, centroids=cents)
    return LloydResult(
        clustering=clustering,
        cost=cost_centroid_form(pts, clustering),
        iterations=iterations,
        converged=converged,
        cost_trace=trace,
        reseeds=reseeds,
    )
