"""Initial centroid selection for the Lloyd iteration.

Six strategies: uniform sample, true centers (needs labels), D^2 sampling,
farthest-first, boosted D^2 sampling and the greedy "global" rule.
All argmax/argmin ties resolve to the lowest point index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import UsageError, as_points, pairwise_sq_dists, sq_dists_to

DEFAULT_BOOST = 15


class SeedingMethod(str, enum.Enum):
    RANDOM = "random"
    TRUE_CENTER = "tc"
    KMPP = "kmpp"
    MOST_DISTANT = "md"
    KMPP_BOOSTED = "kmppb"
    GLOBAL = "global"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def uses_rng(self) -> bool:
        return self not in (SeedingMethod.TRUE_CENTER, SeedingMethod.GLOBAL)


_LABELS = {
    SeedingMethod.RANDOM: "k-means",
    SeedingMethod.TRUE_CENTER: "tc-k-means",
    SeedingMethod.KMPP: "k-means++",
    SeedingMethod.MOST_DISTANT: "md-k-means",
    SeedingMethod.KMPP_BOOSTED: "k-means++B",
    SeedingMethod.GLOBAL: "glob-k-means",
}

ALL_METHODS = list(SeedingMethod)


@dataclass(frozen=True)
class SeedSet:
    centroids: np.ndarray
    method: SeedingMethod
    indices: tuple = ()  # dataset rows picked, where the method samples data points
    seed: int | None = None
    params: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "seed": self.seed,
            "params": dict(self.params),
            "indices": [None if i is None else int(i) for i in self.indices],
            "centroids": self.centroids.tolist(),
        }


def _check_k(n: int, k: int) -> None:
    if k < 1:
        raise UsageError("k must be positive")
    if k > n:
        raise UsageError(f"k={k} exceeds the {n} available points")


def _first(n: int, rng: np.random.Generator, first) -> int:
    if first is None:
        return int(rng.integers(n))
    if not 0 <= first < n:
        raise UsageError(f"first index {first} out of range")
    return int(first)


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def sample_proportional(weights: np.ndarray, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Draw indices with probability proportional to ``weights`` (with replacement).

    Zero-weight entries are never returned.
    """
    cum = np.cumsum(weights)
    total = cum[-1]
    if not total > 0:
        raise UsageError("all sampling weights are zero (fewer distinct points than k)")
    u = rng.random(size) * total
    idx = np.searchsorted(cum, u, side="right")
    # u can round up to total; fall back to the last positive weight
    last = int(np.flatnonzero(weights > 0)[-1])
    return np.minimum(idx, last)


def init_random(points, k: int, rng=None) -> SeedSet:
    pts = as_points(points)
    _check_k(len(pts), k)
    rng = _rng(rng)
    idx = rng.choice(len(pts), size=k, replace=False)
    return SeedSet(pts[idx].copy(), SeedingMethod.RANDOM, tuple(int(i) for i in idx))


def init_true_centers(ld) -> SeedSet:
    """Means of the regular points of each intended cluster, in label order."""
    if getattr(ld, "labels", None) is None:
        raise UsageError("true-center seeding needs intended labels")
    pts = as_points(ld.points)
    labels = np.asarray(ld.labels)
    k = int(ld.k)
    cents = []
    for j in range(k):
        members = pts[labels == j]
        if len(members) == 0:
            raise UsageError(f"intended cluster {j} is empty")
        cents.append(members.mean(axis=0))
    return SeedSet(np.asarray(cents), SeedingMethod.TRUE_CENTER)


def init_kmeanspp(points, k: int, rng=None, first: int | None = None) -> SeedSet:
    pts = as_points(points)
    _check_k(len(pts), k)
    rng = _rng(rng)
    chosen = [_first(len(pts), rng, first)]
    d2 = sq_dists_to(pts, pts[chosen[0]])
    for _ in range(1, k):
        c = int(sample_proportional(d2, rng)[0])
        chosen.append(c)
        np.minimum(d2, sq_dists_to(pts, pts[c]), out=d2)
    return SeedSet(pts[chosen].copy(), SeedingMethod.KMPP, tuple(chosen))


def init_most_distant(points, k: int, rng=None, first: int | None = None) -> SeedSet:
    pts = as_points(points)
    _check_k(len(pts), k)
    rng = _rng(rng)
    chosen = [_first(len(pts), rng, first)]
    d2 = sq_dists_to(pts, pts[chosen[0]])
    for _ in range(1, k):
        c = int(np.argmax(d2))
        chosen.append(c)
        np.minimum(d2, sq_dists_to(pts, pts[c]), out=d2)
    return SeedSet(pts[chosen].copy(), SeedingMethod.MOST_DISTANT, tuple(chosen))


def _potentials(cand_d2: np.ndarray, d2: np.ndarray, squared: bool) -> np.ndarray:
    merged = np.minimum(cand_d2, d2[None, :])
    return merged.sum(axis=1) if squared else np.sqrt(merged).sum(axis=1)


def candidate_potentials(points, chosen, candidates, squared: bool = True) -> np.ndarray:
    """Total (squared) distance to the nearest of ``chosen + [c]`` for each candidate c."""
    pts = as_points(points)
    d2 = pairwise_sq_dists(pts, pts[list(chosen)]).min(axis=1)
    return _potentials(pairwise_sq_dists(pts[list(candidates)], pts), d2, squared)


def init_kmeanspp_boosted(points, k: int, b: int = DEFAULT_BOOST, rng=None,
                          squared: bool = True, first: int | None = None) -> SeedSet:
    """D^2 sampling where each step draws ``b`` candidates and keeps the one
    leaving the smallest total (squared) distance to the nearest seed.

    ``squared=False`` scores candidates by plain distances instead.
    """
    pts = as_points(points)
    _check_k(len(pts), k)
    if b < 1:
        raise UsageError("boost width b must be >= 1")
    rng = _rng(rng)
    chosen = [_first(len(pts), rng, first)]
    d2 = sq_dists_to(pts, pts[chosen[0]])
    for _ in range(1, k):
        draws = sample_proportional(d2, rng, size=b)
        if b == 1:
            c = int(draws[0])
            cand_d2 = sq_dists_to(pts, pts[c])
        else:
            cands = np.unique(draws)  # sorted, so argmin ties go to the lowest index
            cand_d2 = pairwise_sq_dists(pts[cands], pts)
            best = int(np.argmin(_potentials(cand_d2, d2, squared)))
            c = int(cands[best])
            cand_d2 = cand_d2[best]
        chosen.append(c)
        np.minimum(d2, cand_d2, out=d2)
    return SeedSet(pts[chosen].copy(), SeedingMethod.KMPP_BOOSTED, tuple(chosen),
                   params={"b": b, "squared": squared})


@njit(cache=True)
def _reduction_full(pts, dm, v):
    """v[e] = sum over all f of max(0, dm_f - d2(f, e))."""
    n, dim = pts.shape
    for e in range(n):
        acc = 0.0
        for f in range(n):
            d = 0.0
            for t in range(dim):
                diff = pts[e, t] - pts[f, t]
                d += diff * diff
            if d < dm[f]:
                acc += dm[f] - d
        v[e] = acc


@njit(cache=True)
def _reduction_change(pts, cols, before, after, v):
    """Add to v[e] the change of sum_f max(0, dm_f - d2(f, e)) over f in ``cols``
    when dm_f moves from ``before`` to ``after``."""
    n, dim = pts.shape
    for e in range(n):
        acc = 0.0
        for j in range(cols.shape[0]):
            hi = before[j]
            f = cols[j]
            d = 0.0
            for t in range(dim):
                diff = pts[e, t] - pts[f, t]
                d += diff * diff
            if d < hi:
                lo = after[j]
                acc += (lo - d if d < lo else 0.0) - (hi - d)
        v[e] += acc


def init_global(points, k: int) -> SeedSet:
    """Greedy seeding starting from the data mean.

    Each step adds the data point e maximising
    ``v_e = sum_f max(0, d2(f, M) - d2(f, e))``.  After a seed is added only
    the points it captures change their nearest-seed distance, so ``v`` is
    updated over those columns instead of being recomputed from scratch.
    """
    pts = as_points(points)
    _check_k(len(pts), k)
    mean = pts.mean(axis=0)
    cents = [mean]
    chosen: list = [None]
    dm = sq_dists_to(pts, mean)
    v = np.zeros(len(pts))
    _reduction_full(pts, dm, v)
    for _ in range(1, k):
        c = int(np.argmax(v))
        chosen.append(c)
        cents.append(pts[c])
        dnew = sq_dists_to(pts, pts[c])
        changed = np.flatnonzero(dnew < dm)
        if len(changed):
            _reduction_change(pts, changed, dm[changed], dnew[changed], v)
            dm[changed] = dnew[changed]
        v[c] = 0.0
    return SeedSet(np.asarray(cents), SeedingMethod.GLOBAL, tuple(chosen))


def seed(method, points=None, k: int | None = None, rng=None, b: int = DEFAULT_BOOST,
         labeled=None, squared: bool = True) -> SeedSet:
    """Dispatch to one of the strategies by method tag."""
    method = SeedingMethod(method)
    if method is SeedingMethod.TRUE_CENTER:
        if labeled is None:
            raise UsageError("true-center seeding needs a labeled dataset")
        return init_true_centers(labeled)
    if points is None:
        points = labeled.points
    if k is None:
        if labeled is None:
            raise UsageError("k is required")
        k = labeled.k
    if method is SeedingMethod.RANDOM:
        return init_random(points, k, rng)
    if method is SeedingMethod.KMPP:
        return init_kmeanspp(points, k, rng)
    if method is SeedingMethod.MOST_DISTANT:
        return init_most_distant(points, k, rng)
    if method is SeedingMethod.KMPP_BOOSTED:
        return init_kmeanspp_boosted(points, k, b, rng, squared=squared)
    return init_global(points, k)
