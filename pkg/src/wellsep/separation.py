"""Gap thresholds for well-separated clusters, dataset checks, and an
exhaustive optimum for tiny instances."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from .core import Clustering, UsageError, as_points, cost_centroid_form, pairwise_sq_dists

if TYPE_CHECKING:
    from .datagen import LabeledDataset

MAX_PARTITIONS = 10**7
# relative slack for the gap comparison; lattice arithmetic lands exactly on the threshold
GAP_RTOL = 1e-9


def min_gap_threshold(k: int, radius: float, dim: int) -> float:
    """Smallest ball-to-ball gap that makes the intended clustering cost-optimal.

    In the plane a grid cluster has at most 8 neighbours, so the neighbour
    count is capped there; for few clusters the general bound is tighter.
    """
    if k < 2:
        raise UsageError(f"threshold needs k >= 2, got {k}")
    if radius < 0:
        raise UsageError("radius must be non-negative")
    neighbours = k - 1
    if dim == 2:
        neighbours = min(neighbours, 8)
    return radius * (math.sqrt(neighbours) + 3.0)


@dataclass
class SeparationReport:
    per_cluster_radius: list
    min_ball_gap: float
    threshold: float
    satisfied: bool
    nominal_radius: float | None = None
    nominal_min_ball_gap: float | None = None
    nominal_threshold: float | None = None
    nominal_satisfied: bool | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _min_ball_gap(centers: np.ndarray, radii: np.ndarray) -> float:
    d = np.sqrt(pairwise_sq_dists(centers, centers))
    gaps = d - radii[:, None] - radii[None, :]
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def _passes(gap: float, threshold: float) -> bool:
    return gap >= threshold - GAP_RTOL * max(1.0, threshold)


def verify(ld: "LabeledDataset") -> SeparationReport:
    """Check the gap condition around empirical gravity centers, and around the
    generator's nominal centers when the dataset carries its config."""
    pts = as_points(ld.points)
    labels = np.asarray(ld.labels)
    k = ld.k
    if k < 2:
        raise UsageError("separation needs at least two intended clusters")
    dim = pts.shape[1]
    centers, radii = [], []
    for j in range(k):
        members = pts[labels == j]
        if len(members) == 0:
            raise UsageError(f"intended cluster {j} has no regular points")
        mu = members.mean(axis=0)
        centers.append(mu)
        radii.append(float(np.sqrt(((members - mu) ** 2).sum(axis=1).max())))
    radii = np.asarray(radii)
    gap = _min_ball_gap(np.asarray(centers), radii)
    threshold = min_gap_threshold(k, float(radii.max()), dim)
    report = SeparationReport(
        per_cluster_radius=radii.tolist(),
        min_ball_gap=gap,
        threshold=threshold,
        satisfied=_passes(gap, threshold),
    )
    if ld.config is not None:
        r = float(ld.config.radius)
        ngap = _min_ball_gap(np.asarray(ld.centers, dtype=np.float64), np.full(k, r))
        nthr = min_gap_threshold(k, r, dim)
        report.nominal_radius = r
        report.nominal_min_ball_gap = ngap
        report.nominal_threshold = nthr
        report.nominal_satisfied = _passes(ngap, nthr)
    return report


# --- exhaustive optimum -------------------------------------------------------

@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Number of partitions of ``n`` labelled items into ``k`` non-empty blocks."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def restricted_growth_strings(n: int, k: int) -> np.ndarray:
    """All length-``n`` restricted growth strings using exactly ``k`` blocks,
    in lexicographic order, one per row."""
    if k < 1 or k > n:
        raise UsageError(f"cannot split {n} items into {k} blocks")
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # highest block index used so far
    values = np.arange(k, dtype=np.int8)
    for pos in range(1, n):
        remaining = n - pos - 1
        new_top = np.maximum(top[:, None], values[None, :])
        ok = values[None, :] <= top[:, None] + 1
        # enough positions left to open the missing blocks
        ok &= (k - 1 - new_top) <= remaining
        parent, val = np.nonzero(ok)  # row-major keeps lexicographic order
        rows = np.hstack((rows[parent], values[val, None]))
        top = new_top[parent, val]
    return rows


def _partition_costs(pts: np.ndarray, rgs: np.ndarray, k: int) -> np.ndarray:
    sq = np.einsum("ij,ij->i", pts, pts)
    cost = np.zeros(rgs.shape[0])
    for j in range(k):
        mask = (rgs == j).astype(np.float64)
        n_j = mask.sum(axis=1)
        s = mask @ pts
        cost += mask @ sq - np.einsum("ij,ij->i", s, s) / n_j
    return cost


def brute_force_optimum(points, k: int, chunk: int = 200_000):
    """Enumerate every partition into exactly ``k`` non-empty clusters.

    Returns ``(clustering, cost)`` for the cheapest one; ties keep the first
    partition in restricted-growth order.
    """
    pts = as_points(points)
    n = pts.shape[0]
    count = stirling2(n, k)
    if count == 0:
        raise UsageError(f"cannot split {n} points into {k} non-empty clusters")
    if count > MAX_PARTITIONS:
        raise UsageError(
            f"instance too large: S({n},{k}) = {count:.3e} partitions exceeds {MAX_PARTITIONS:.0e}"
        )
    rgs = restricted_growth_strings(n, k)
    centred = pts - pts.mean(axis=0)
    costs = np.concatenate([
        _partition_costs(centred, rgs[i:i + chunk], k) for i in range(0, rgs.shape[0], chunk)
    ])
    best = int(np.argmin(costs))
    clustering = Clustering.from_assignment(pts, rgs[best].astype(np.int64), k)
    return clustering, cost_centroid_form(pts, clustering)


def partition_costs(points, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Every ``k``-partition (as restricted growth strings) with its cost.

    Exposed for diagnostics such as checking that the optimum is unique.
    """
    pts = as_points(points)
    if stirling2(pts.shape[0], k) > MAX_PARTITIONS:
        raise UsageError("instance too large for exhaustive enumeration")
    rgs = restricted_growth_strings(pts.shape[0], k)
    return rgs, _partition_costs(pts - pts.mean(axis=0), rgs, k)
