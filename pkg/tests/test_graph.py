import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphdist import fixtures
from graphdist.errors import (
    Disconnected,
    DuplicateEdge,
    IsolatedNode,
    NonPositiveWeight,
    ParseError,
    SelfLoop,
    ValidationError,
)
from graphdist.graph import (
    CostedGraph,
    dumps_graph,
    laplacian_pair,
    load_graph,
    parse_graph,
    read_matrix_csv,
    save_graph,
    transition_matrix,
    write_matrix_csv,
    write_meta,
)

from conftest import CANONICAL, random_graphs


def test_parse_reciprocal_cost():
    g = parse_graph("0\t1\t1.0\n")
    assert g.n == 2 and g.edges == ((0, 1, 1.0, 1.0),)
    g = parse_graph("0\t1\t2.0\n")
    assert g.edges[0][3] == 0.5


def test_parse_explicit_cost_and_comments():
    g = parse_graph("# header\n\n1\t0\t2.0\t7.0\n")
    assert g.edges == ((0, 1, 2.0, 7.0),)


@pytest.mark.parametrize(
    "text, exc",
    [
        ("0\t1\n", ParseError),
        ("0\tx\t1\n", ParseError),
        ("0\t1\t-1\n", NonPositiveWeight),
        ("0\t1\t0\n", NonPositiveWeight),
        ("0\t1\t1\t0\n", NonPositiveWeight),
        ("0\t1\t1\n1\t0\t2\n", DuplicateEdge),
        ("2\t2\t1\n", SelfLoop),
    ],
)
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_graph(text)


def test_parse_error_reports_line():
    with pytest.raises(ParseError, match="line 3"):
        parse_graph("0\t1\t1\n1\t2\t1\n2\tbad\t1\n")


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        CostedGraph(2, ((0, 1, -1.0, 1.0),))


def test_node_directive_keeps_isolated_tail():
    g = parse_graph("# nodes=3\n0\t1\t1\n")
    assert g.n == 3 and not g.connected
    with pytest.raises(Disconnected):
        laplacian_pair(g)
    with pytest.raises(IsolatedNode):
        transition_matrix(g)


def test_transition_examples():
    assert np.array_equal(transition_matrix(fixtures.k2()), [[0, 1], [1, 0]])
    assert np.allclose(transition_matrix(fixtures.path3())[1], [0.5, 0, 0.5])
    star = CostedGraph.from_edges(3, [(0, 1, 1.0), (0, 2, 3.0)])
    assert np.allclose(transition_matrix(star)[0], [0, 0.25, 0.75])


def test_transition_rows_sum_to_one():
    for g in random_graphs(30, n_max=20):
        P = transition_matrix(g)
        assert np.all(np.abs(P.sum(axis=1) - 1) <= 1e-12)
        assert np.array_equal(P > 0, g.mask)


def test_laplacian_k2():
    lp = laplacian_pair(fixtures.k2())
    assert np.array_equal(lp.L, [[1, -1], [-1, 1]])
    assert np.allclose(lp.Lplus, [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)


def test_laplacian_plus_degree_rows():
    for g in CANONICAL.values():
        lp = laplacian_pair(g)
        assert np.array_equal((lp.L + g.affinity).sum(axis=1), g.degrees)
        assert np.abs(lp.L.sum(axis=1)).max() == 0


def test_ext_triangle_volume():
    assert laplacian_pair(fixtures.extended_triangle()).volume == 8


def test_penrose_conditions_random():
    for g in random_graphs(20, n_max=50, n_min=10, seed=3):
        lp = laplacian_pair(g)
        L, Lp = lp.L, lp.Lplus
        rel = lambda X, Y: np.linalg.norm(X - Y) / np.linalg.norm(Y)
        assert rel(L @ Lp @ L, L) < 1e-8
        assert rel(Lp @ L @ Lp, Lp) < 1e-8
        assert np.abs(Lp @ np.ones(g.n)).max() < 1e-8
        assert np.array_equal(Lp, Lp.T)


def test_pinv_matches_numpy():
    for g in random_graphs(10, n_max=15, seed=4):
        assert np.allclose(laplacian_pair(g).Lplus, np.linalg.pinv(np.diag(g.degrees) - g.affinity), atol=1e-10)


def test_roundtrip_bit_identical(tmp_path):
    gs = list(CANONICAL.values()) + random_graphs(5, independent_costs=True)
    for g in gs:
        path = tmp_path / "g.tsv"
        save_graph(g, path)
        h = load_graph(path)
        assert h == g
        assert dumps_graph(h) == dumps_graph(g)
        assert h.sha256() == g.sha256()


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 7), st.integers(0, 7), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3)),
        max_size=20,
    )
)
def test_roundtrip_property(edges):
    seen, clean = set(), []
    for u, v, a, c in edges:
        key = (min(u, v), max(u, v))
        if u != v and key not in seen:
            seen.add(key)
            clean.append((u, v, a, c))
    g = CostedGraph(8, tuple(clean))
    assert parse_graph(dumps_graph(g)) == g


def test_from_matrices():
    g = fixtures.extended_triangle()
    h = CostedGraph.from_matrices(g.affinity, g.cost)
    assert h == g
    with pytest.raises(ValidationError):
        CostedGraph.from_matrices(np.array([[0, 1], [2, 0]]))


def test_matrix_csv_roundtrip(tmp_path):
    M = np.random.default_rng(0).normal(size=(4, 4))
    write_matrix_csv(M, tmp_path / "m.csv")
    assert np.array_equal(read_matrix_csv(tmp_path / "m.csv"), M)
    text = (tmp_path / "m.csv").read_text().splitlines()
    assert len(text) == 4 and text[0].count(",") == 3


def test_meta_sidecar(tmp_path):
    import json

    g = fixtures.k2()
    p = write_meta(tmp_path / "d.csv", "FE", {"beta": 1.0}, g)
    meta = json.loads(p.read_text())
    assert set(meta) == {"method", "params", "n", "graph_sha256"}
    assert p.name == "d.csv.meta.json"


def test_graph_is_immutable():
    g = fixtures.k2()
    with pytest.raises(ValueError):
        g.affinity[0, 1] = 5.0
    with pytest.raises(Exception):
        g.n = 3
