"""Cluster-recovery metrics and run summaries."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Clustering, UsageError, cost_centroid_form
from .datagen import NOISE


@dataclass(frozen=True)
class SummaryRow:
    mean: float
    sd: float


@dataclass
class RunMetrics:
    tot_within_ss: float
    wrong_clusters_pct: float
    rel_tot_within_ss: float = float("nan")


def tot_within_ss(points, clustering: Clustering) -> float:
    """Within-cluster sum of squares over every point, noise included."""
    return cost_centroid_form(points, clustering)


def discovered_mask(labels, assignment) -> np.ndarray:
    """Boolean per intended cluster: True when some found cluster holds exactly
    the same regular points (noise membership is ignored)."""
    labels = np.asarray(labels)
    assignment = np.asarray(assignment)
    if labels.shape != assignment.shape:
        raise UsageError("labels and assignment differ in length")
    reg = labels != NOISE
    lab = labels[reg]
    found = assignment[reg]
    k = int(lab.max()) + 1 if lab.size else 0
    if k == 0:
        return np.zeros(0, dtype=bool)
    f = int(found.max()) + 1
    table = np.zeros((k, f), dtype=np.int64)
    np.add.at(table, (lab, found), 1)
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    best = table.argmax(axis=1)
    top = table[np.arange(k), best]
    return (row > 0) & (top == row) & (col[best] == row)


def erroneous_found_clusters(labels, assignment) -> np.ndarray:
    """Found cluster ids whose regular points match no intended cluster.

    Found clusters made only of noise are not flagged.
    """
    labels = np.asarray(labels)
    assignment = np.asarray(assignment)
    reg = labels != NOISE
    mask = discovered_mask(labels, assignment)
    good = set()
    for i in np.flatnonzero(mask):
        good.add(int(assignment[reg][labels[reg] == i][0]))
    present = np.unique(assignment[reg])
    return np.array([c for c in present.tolist() if c not in good], dtype=np.int64)


def wrong_clusters_pct(ld, clustering) -> float:
    assignment = getattr(clustering, "assignment", clustering)
    k = int(ld.k)
    if k == 0:
        raise UsageError("dataset has no intended clusters")
    hit = discovered_mask(ld.labels, assignment)
    hits = int(hit.sum())
    return 100.0 * (k - hits) / k


def rel_tot_within_ss(costs: dict) -> dict:
    """Each cost divided by the lowest cost in ``costs``."""
    if not costs:
        raise UsageError("need at least one algorithm's cost")
    low = min(costs.values())
    out = {}
    for name, c in costs.items():
        if low > 0:
            out[name] = c / low
        else:
            out[name] = 1.0 if c == low else math.inf
    return out


def summarize(values) -> SummaryRow:
    """Mean and sample standard deviation; the variance is clamped at zero.

    Sums are exactly rounded, so the result does not depend on input order.
    """
    x = [float(v) for v in values]
    if not x:
        raise UsageError("cannot summarize an empty list")
    mean = math.fsum(x) / len(x)
    if len(x) == 1 or not math.isfinite(mean):
        return SummaryRow(mean, 0.0)
    var = math.fsum((v - mean) ** 2 for v in x) / (len(x) - 1)
    return SummaryRow(mean, math.sqrt(max(var, 0.0)))
