import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wellsep.core import Clustering, UsageError
from wellsep.datagen import NOISE, LabeledDataset
from wellsep.evaluation import (discovered_mask, erroneous_found_clusters, rel_tot_within_ss,
                                summarize, tot_within_ss, wrong_clusters_pct)

# three intended clusters of three points plus two noise points
LABELS = np.array([0, 0, 0, 1, 1, 1, 2, 2, 2, NOISE, NOISE])
LD = LabeledDataset(points=np.arange(22, dtype=float).reshape(11, 2), labels=LABELS,
                    centers=np.zeros((3, 2)))


def test_exact_recovery_with_noise_anywhere():
    assert wrong_clusters_pct(LD, np.array([2, 2, 2, 0, 0, 0, 1, 1, 1, 1, 0])) == 0.0


def test_split_cluster():
    # intended cluster 0 split over found 0 and 3
    a = np.array([0, 0, 3, 1, 1, 1, 2, 2, 2, 0, 0])
    assert wrong_clusters_pct(LD, a) == pytest.approx(100 / 3)
    assert erroneous_found_clusters(LABELS, a).tolist() == [0, 3]


def test_merged_clusters():
    a = np.array([0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2])
    assert wrong_clusters_pct(LD, a) == pytest.approx(200 / 3)
    # found cluster 2 holds only noise and is not flagged
    assert erroneous_found_clusters(LABELS, a).tolist() == [0]


def test_tot_within_ss_counts_noise():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [100.0, 0.0]])
    g = Clustering.from_assignment(pts, [0, 0, 1], 2)
    assert tot_within_ss(pts, g) == pytest.approx(2.0)
    g = Clustering.from_assignment(pts, [0, 0, 0], 1)
    assert tot_within_ss(pts, g) > 2.0


@pytest.mark.parametrize("costs,expected", [
    ({"a": 5.0}, {"a": 1.0}),
    ({"a": 10.0, "b": 20.0, "c": 40.0}, {"a": 1.0, "b": 2.0, "c": 4.0}),
    ({"a": 3.0, "b": 3.0}, {"a": 1.0, "b": 1.0}),
    ({"a": 0.0, "b": 1.0}, {"a": 1.0, "b": math.inf}),
])
def test_rel_tot_within_ss(costs, expected):
    assert rel_tot_within_ss(costs) == expected


def test_rel_tot_within_ss_empty():
    with pytest.raises(UsageError):
        rel_tot_within_ss({})


@pytest.mark.parametrize("values,mean,sd", [
    ([0.0] * 30, 0.0, 0.0),
    ([1.0, 2.0, 3.0], 2.0, 1.0),
    ([7.5], 7.5, 0.0),
])
def test_summarize(values, mean, sd):
    row = summarize(values)
    assert row.mean == pytest.approx(mean)
    assert row.sd == pytest.approx(sd)


def test_summarize_jitter_never_nan():
    vals = [0.1 + (1e-16 if i % 2 else 0.0) for i in range(30)]
    row = summarize(vals)
    assert row.sd >= 0 and not math.isnan(row.sd)
    with pytest.raises(UsageError):
        summarize([])


@st.composite
def labelled_assignment(draw):
    k = draw(st.integers(1, 6))
    sizes = draw(st.lists(st.integers(1, 5), min_size=k, max_size=k))
    labels = np.repeat(np.arange(k), sizes)
    n_noise = draw(st.integers(0, 4))
    labels = np.concatenate((labels, np.full(n_noise, NOISE)))
    f = draw(st.integers(1, 8))
    assignment = np.array(draw(st.lists(st.integers(0, f - 1), min_size=len(labels),
                                        max_size=len(labels))))
    return labels, assignment


def brute_discovered(labels, assignment):
    reg = labels != NOISE
    out = []
    for i in range(labels[reg].max() + 1):
        target = set(np.flatnonzero(labels == i))
        out.append(any(set(np.flatnonzero(reg & (assignment == f))) == target
                       for f in np.unique(assignment)))
    return np.array(out)


@given(labelled_assignment(), st.randoms())
@settings(max_examples=200)
def test_discovery_rule(case, rnd):
    labels, assignment = case
    mask = discovered_mask(labels, assignment)
    assert np.array_equal(mask, brute_discovered(labels, assignment))
    # relabelling the found clusters changes nothing
    perm = list(range(assignment.max() + 1))
    rnd.shuffle(perm)
    assert np.array_equal(discovered_mask(labels, np.array(perm)[assignment]), mask)
    ld = LabeledDataset(np.zeros((len(labels), 2)), labels, np.zeros((labels.max() + 1, 2)))
    zero = wrong_clusters_pct(ld, assignment) == 0
    reg = labels != NOISE
    same_partition = all(
        len(set(assignment[reg][labels[reg] == i])) == 1 for i in range(ld.k)
    ) and len(set(assignment[reg])) == ld.k
    assert zero == same_partition


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40), st.randoms())
def test_summarize_order_invariant(values, rnd):
    shuffled = values[:]
    rnd.shuffle(shuffled)
    assert summarize(values) == summarize(shuffled)
