import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import normalized_mutual_info_score

from graphdist import fixtures
from graphdist.analysis import Partition, canonical, center_kernel, kernel_kmeans, nmi, sigmoid_ct_kernel
from graphdist.analysis.clustering import _inertia
from graphdist.errors import ParamOutOfRange, ValidationError
from graphdist.graph import laplacian_pair
from graphdist.rsp import free_energy


def brute_force_best(K, k):
    n = K.shape[0]
    best = None
    for labels in itertools.product(range(k), repeat=n):
        if labels[0] != 0 or len(set(labels)) != k:
            continue
        val = _inertia(K, np.array(labels), k)
        if best is None or val < best[0] - 1e-12:
            best = (val, labels)
    return best


def test_two_cliques_fe_recovers_split():
    g = fixtures.two_cliques(10)
    P = kernel_kmeans(center_kernel(free_energy(g, 1.0)), 2, restarts=10, seed=0)
    truth = np.repeat([0, 1], 10)
    assert nmi(P, truth) == 1.0


def test_k_equals_n_gives_singletons():
    K = center_kernel(free_energy(fixtures.hub_4_3(), 0.5))
    P = kernel_kmeans(K, 8, restarts=3, seed=1)
    assert sorted(P.sizes()) == [1] * 8
    assert P.inertia == pytest.approx(0.0, abs=1e-12)


def test_duplicates_are_coclustered():
    rng = np.random.default_rng(61)
    X = rng.normal(size=(6, 3))
    X = np.vstack([X, X[:2]])  # rows 6, 7 duplicate rows 0, 1
    K = X @ X.T
    for seed in range(5):
        P = kernel_kmeans(K, 3, restarts=5, seed=seed)
        assert P.assignment[6] == P.assignment[0]
        assert P.assignment[7] == P.assignment[1]


def test_matches_brute_force_on_small_psd_kernels():
    rng = np.random.default_rng(62)
    for _ in range(6):
        X = rng.normal(size=(7, 2))
        K = X @ X.T
        P = kernel_kmeans(K, 2, restarts=30, seed=0)
        best, _ = brute_force_best(K, 2)
        assert P.inertia == pytest.approx(best, rel=1e-10, abs=1e-12)


def test_inertia_matches_feature_space():
    rng = np.random.default_rng(63)
    X = rng.normal(size=(15, 4))
    P = kernel_kmeans(X @ X.T, 3, restarts=5, seed=2)
    expect = sum(((X[P.assignment == c] - X[P.assignment == c].mean(axis=0)) ** 2).sum() for c in range(3))
    assert P.inertia == pytest.approx(expect, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 4))
def test_inertia_non_increasing_and_nonempty(seed, k):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(k, 20)), 3))
    P = kernel_kmeans(X @ X.T, k, restarts=3, seed=seed)
    h = np.array(P.history)
    assert np.all(np.diff(h) <= 1e-12 * max(1.0, abs(h[0])))
    assert np.all(P.sizes() > 0)
    assert P.inertia >= -1e-12


def test_non_increasing_on_indefinite_kernel():
    A = np.random.default_rng(64).normal(size=(12, 12))
    K = A + A.T
    assert np.linalg.eigvalsh(K).min() < -1.0
    for seed in range(10):
        h = np.array(kernel_kmeans(K, 3, restarts=1, seed=seed).history)
        assert np.all(np.diff(h) <= 0)


def test_deterministic_given_seed():
    K = sigmoid_ct_kernel(laplacian_pair(fixtures.two_cliques(6)), 5.0)
    a = kernel_kmeans(K, 3, restarts=7, seed=11)
    b = kernel_kmeans(K, 3, restarts=7, seed=11)
    c = kernel_kmeans(K, 3, restarts=7, seed=11, threads=4)
    assert np.array_equal(a.assignment, b.assignment) and a.inertia == b.inertia
    assert np.array_equal(a.assignment, c.assignment)


def test_kmeans_guards():
    K = np.eye(3)
    with pytest.raises(ParamOutOfRange):
        kernel_kmeans(K, 1)
    with pytest.raises(ParamOutOfRange):
        kernel_kmeans(K, 4)
    with pytest.raises(ParamOutOfRange):
        kernel_kmeans(K, 2, restarts=0)


def test_canonical_relabeling():
    assert canonical([2, 2, 0, 1, 0]).tolist() == [0, 0, 1, 2, 1]


def test_nmi_examples():
    a = np.array([0, 0, 1, 1])
    assert nmi(a, a) == 1.0
    assert nmi(np.zeros(4), a) == 0.0
    assert nmi(a, np.array([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-15)
    assert nmi(Partition.from_labels(["x", "x", "y", "y"]), a) == 1.0
    with pytest.raises(ValidationError):
        nmi(a, a[:3])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 4)), min_size=1, max_size=40))
def test_nmi_symmetric_bounded_and_matches_sklearn(pairs):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    v = nmi(x, y)
    assert v == nmi(y, x)
    assert 0.0 <= v <= 1.0 + 1e-12
    if len(set(x)) > 1 and len(set(y)) > 1:
        assert v == pytest.approx(normalized_mutual_info_score(x, y, average_method="geometric"), abs=1e-10)
