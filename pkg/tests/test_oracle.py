import math

import numpy as np
import pytest

from graphdist import fixtures
from graphdist.errors import DegenerateEnsemble, EnsembleTooLarge, ParamOutOfRange
from graphdist.oracle import (
    enumerate_hitting_paths,
    oracle_expected_cost,
    oracle_partition_function,
    oracle_relative_entropy,
    oracle_tail_bound,
    path_sums,
    sherman_morrison_zh,
)
from graphdist.rsp import build_core, directed_expected_costs, relative_entropy_matrix

from conftest import CANONICAL, random_graphs


def test_k2_single_path():
    ens = enumerate_hitting_paths(fixtures.k2(), 0, 1, 5)
    assert ens.paths == ((0, 1),)
    assert ens.tail_bound == 0
    for beta in (0.3, 2.0):
        assert oracle_partition_function(ens, beta) == pytest.approx(math.exp(-beta), rel=1e-15)
        assert oracle_expected_cost(ens, beta) == pytest.approx(1.0)
        assert oracle_relative_entropy(ens, beta) == pytest.approx(0.0, abs=1e-15)


def test_path3_parity_walks():
    ens = enumerate_hitting_paths(fixtures.path3(), 0, 2, 5)
    assert ens.paths == ((0, 1, 2), (0, 1, 0, 1, 2))
    assert np.allclose(ens.ref_prob, [0.5, 0.25])
    assert np.allclose(ens.cost, [2, 4])


def test_zero_length_path():
    ens = enumerate_hitting_paths(fixtures.extended_triangle(), 2, 2, 7)
    assert ens.paths == ((2,),)
    assert oracle_partition_function(ens, 1.3) == 1.0
    assert oracle_expected_cost(ens, 1.3) == 0.0


def test_every_path_is_hitting():
    ens = enumerate_hitting_paths(fixtures.extended_triangle(), 0, 2, 10)
    g = fixtures.extended_triangle()
    for w, p in zip(ens.paths, ens.ref_prob):
        assert w[0] == 0 and w[-1] == 2 and 2 not in w[:-1]
        assert all(g.mask[a, b] for a, b in zip(w[:-1], w[1:]))
        assert 0 < p <= 1
    assert len(set(ens.paths)) == len(ens.paths)


def test_enumeration_cap_and_range():
    with pytest.raises(EnsembleTooLarge):
        enumerate_hitting_paths(fixtures.hub_4_3(), 0, 7, 12, max_paths=1000)
    with pytest.raises(ParamOutOfRange):
        enumerate_hitting_paths(fixtures.k2(), 0, 1, 41)


def test_empty_ensemble_degenerate():
    ens = enumerate_hitting_paths(fixtures.path3(), 0, 2, 1)
    assert len(ens) == 0
    with pytest.raises(DegenerateEnsemble):
        oracle_expected_cost(ens, 1.0)


@pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
def test_enumeration_matches_closed_form_within_tail(beta):
    g = fixtures.extended_triangle()
    core = build_core(g, beta)
    for s in range(4):
        for t in range(4):
            ens = enumerate_hitting_paths(g, s, t, 14)
            z = oracle_partition_function(ens, beta)
            assert abs(core.Zh[s, t] - z) <= ens.tail_bound + 1e-12
            assert z <= core.Zh[s, t] + 1e-15


def test_enumeration_and_path_sums_agree_at_same_length():
    g = fixtures.hub_4_3()
    for t_max in (3, 6, 8):
        ens = enumerate_hitting_paths(g, 0, 6, t_max)
        ps = path_sums(g, 0, 6, 0.8, t_max=t_max)
        assert ps.z == pytest.approx(oracle_partition_function(ens, 0.8), rel=1e-13)
        assert oracle_expected_cost(ps) == pytest.approx(oracle_expected_cost(ens, 0.8), rel=1e-12)
        assert oracle_relative_entropy(ps) == pytest.approx(oracle_relative_entropy(ens, 0.8), rel=1e-9, abs=1e-13)
        assert ps.tail_bound == pytest.approx(oracle_tail_bound(g, 0, 6, 0.8, t_max), rel=1e-12)


def test_extended_triangle_length_40():
    g = fixtures.extended_triangle()
    core = build_core(g, 1.0)
    ps = path_sums(g, 0, 2, 1.0, t_max=40)
    assert abs(ps.z - core.Zh[0, 2]) <= 1e-10
    assert abs(oracle_expected_cost(ps) - directed_expected_costs(core)[0, 2]) <= 1e-8
    assert abs(oracle_relative_entropy(ps) - relative_entropy_matrix(core)[0, 2]) <= 1e-8


def test_tail_bound_is_rigorous():
    # The bound must dominate the true remainder at every truncation length.
    g = fixtures.hub_4_3()
    core = build_core(g, 0.25)
    for T in (1, 5, 20, 60):
        ps = path_sums(g, 3, 6, 0.25, t_max=T)
        remainder = core.Zh[3, 6] - ps.z
        assert -1e-15 <= remainder <= ps.tail_bound + 1e-15


def test_relative_entropy_nonnegative_on_ensembles():
    g = fixtures.extended_triangle()
    for beta in (0.1, 1.0, 5.0):
        for s, t in [(0, 2), (2, 0), (3, 1)]:
            assert oracle_relative_entropy(enumerate_hitting_paths(g, s, t, 12), beta) >= -1e-15


def test_cost_is_derivative_of_log_partition():
    g = fixtures.extended_triangle()
    h = 1e-4
    for beta in (0.5, 2.0):
        for s, t in [(0, 2), (3, 0)]:
            up = path_sums(g, s, t, beta + h)
            dn = path_sums(g, s, t, beta - h)
            deriv = -(math.log(up.z) - math.log(dn.z)) / (2 * h)
            assert deriv == pytest.approx(oracle_expected_cost(path_sums(g, s, t, beta)), abs=1e-5)


def test_sherman_morrison_k2():
    beta = 0.9
    col = sherman_morrison_zh(fixtures.k2(), beta, 1)
    assert col == pytest.approx([math.exp(-beta), 1.0], rel=1e-13)


def test_sherman_morrison_all_columns(canonical_graph):
    g = canonical_graph
    for beta in (0.25, 1.0, 4.0):
        core = build_core(g, beta)
        for t in range(g.n):
            col = sherman_morrison_zh(g, beta, t)
            assert col[t] == 1.0
            assert np.abs(col - core.Zh[:, t]).max() <= 1e-10


def test_path_sums_random_graphs():
    for g in random_graphs(5, n_max=7, independent_costs=True, seed=31):
        core = build_core(g, 1.0)
        C = directed_expected_costs(core)
        for s in range(g.n):
            for t in range(g.n):
                ps = path_sums(g, s, t, 1.0)
                assert abs(ps.z - core.Zh[s, t]) <= ps.tail_bound + 1e-12
                assert oracle_expected_cost(ps) == pytest.approx(C[s, t], abs=1e-8)
