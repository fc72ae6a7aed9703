import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphdist import fixtures
from graphdist.analysis import LabelSet, gen_sbm, propagate_1nn, stratified_folds, stratified_sample, tune_by_cv
from graphdist.errors import ParamOutOfRange, ValidationError
from graphdist.methods import compute
from graphdist.rsp import free_energy


def naive_propagate(D, seeds):
    labels = seeds.labels.copy()
    known = seeds.mask.copy()
    while not known.all():
        best = None
        for u in np.flatnonzero(~known):
            for v in np.flatnonzero(known):
                key = (D[u, v], u, v)
                if best is None or key < best:
                    best = key
        _, u, v = best
        labels[u] = labels[v]
        known[u] = True
    return labels


def test_all_labeled_is_fixed_point():
    D = free_energy(fixtures.hub_4_3(), 0.5)
    seeds = LabelSet.full([0, 0, 0, 0, 1, 1, 1, 1])
    assert np.array_equal(propagate_1nn(D, seeds).labels, seeds.labels)


def test_two_cliques_recovered():
    g = fixtures.two_cliques(10)
    truth = np.repeat([0, 1], 10)
    out = propagate_1nn(free_energy(g, 0.07), LabelSet.partial(truth, [0, 15]))
    assert np.array_equal(out.labels, truth)


def test_single_seed_labels_everything():
    D = free_energy(fixtures.hub_4_3(), 0.5)
    out = propagate_1nn(D, LabelSet.partial(np.full(8, 3), [5]))
    assert np.all(out.labels == 3) and out.mask.all()


def test_needs_a_seed():
    with pytest.raises(ValidationError):
        propagate_1nn(np.zeros((3, 3)), LabelSet(np.zeros(3), np.zeros(3, dtype=bool)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_matches_naive_with_ties(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 12))
    A = rng.integers(1, 4, size=(n, n)).astype(float)  # many ties
    D = A + A.T
    np.fill_diagonal(D, 0)
    mask = rng.random(n) < 0.4
    mask[int(rng.integers(n))] = True
    seeds = LabelSet(rng.integers(0, 3, size=n), mask)
    out = propagate_1nn(D, seeds)
    assert np.array_equal(out.labels, naive_propagate(D, seeds))
    assert np.array_equal(out.labels, propagate_1nn(D, seeds).labels)


def test_stratified_helpers():
    labels = np.repeat([0, 1, 2], [10, 6, 4])
    folds = stratified_folds(labels, np.arange(20), 4, np.random.default_rng(0))
    assert sorted(np.concatenate(folds).tolist()) == list(range(20))
    for f in folds:
        assert 4 <= len(f) <= 6
    pick = stratified_sample(labels, 0.5, np.random.default_rng(1))
    assert np.bincount(labels[pick]).tolist() == [5, 3, 2]
    assert len(stratified_sample(labels, 0.01, np.random.default_rng(1))) == 3
    with pytest.raises(ParamOutOfRange):
        stratified_sample(labels, 0.0, np.random.default_rng(1))


def test_tune_single_grid_value():
    g, truth = gen_sbm([6, 6], 0.8, 0.1, seed=2)
    res = tune_by_cv(lambda b: free_energy(g, b), LabelSet.full(truth), 3, [0.3])
    assert res.best == 0.3


def test_tune_picks_dominant_value():
    g, truth = gen_sbm([15, 15], 0.6, 0.05, seed=3)
    seeds = LabelSet.partial(truth, np.arange(0, 30, 2))
    good = free_energy(g, 0.5)
    noise = np.random.default_rng(0).uniform(1, 2, size=(30, 30))
    noise = noise + noise.T
    np.fill_diagonal(noise, 0)
    res = tune_by_cv(lambda v: good if v == 2.0 else noise, seeds, 5, [1.0, 2.0, 3.0])
    assert res.best == 2.0
    assert max(res.scores) == res.scores[1] == 1.0


def test_tune_ties_go_to_smaller():
    g, truth = gen_sbm([10, 10], 0.9, 0.02, seed=4)
    D = free_energy(g, 1.0)
    res = tune_by_cv(lambda v: D, LabelSet.full(truth), 4, [5.0, 2.0, 3.0])
    assert res.best == 2.0


def test_tune_guards():
    ls = LabelSet.full([0, 1, 0, 1])
    with pytest.raises(ParamOutOfRange):
        tune_by_cv(lambda v: np.zeros((4, 4)), ls, 1, [1.0])
    with pytest.raises(ParamOutOfRange):
        tune_by_cv(lambda v: np.zeros((4, 4)), ls, 2, [])


def test_labeling_rate_sweep_supported():
    g, truth = gen_sbm([12, 12, 12], 0.5, 0.03, seed=5)
    for rate in (0.1, 0.3, 0.5, 0.7, 0.9):
        pick = stratified_sample(truth, rate, np.random.default_rng(0))
        res = tune_by_cv(lambda b: compute(g, "fe", {"beta": b}), LabelSet.partial(truth, pick), 5, [0.01, 0.1, 1.0])
        assert res.best in (0.01, 0.1, 1.0)
