"""Built-in graphs used by the tests and addressable by name from the CLI.

Node ids are 0-based. The figure graphs from the literature number nodes from
1, so paper node ``i`` is fixture node ``i - 1``.
"""
from __future__ import annotations

import itertools

import numpy as np

from .graph import CostedGraph


def k2(a: float = 1.0, c: float | None = None) -> CostedGraph:
    return CostedGraph.from_edges(2, [(0, 1, a) if c is None else (0, 1, a, c)])


def path3(costs: tuple[float, float] | None = None) -> CostedGraph:
    if costs is None:
        return CostedGraph.from_edges(3, [(0, 1), (1, 2)])
    return CostedGraph.from_edges(3, [(0, 1, 1.0, costs[0]), (1, 2, 1.0, costs[1])])


def triangle() -> CostedGraph:
    return CostedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def extended_triangle() -> CostedGraph:
    """A triangle {1, 2, 3} with a pendant node 0 hanging off node 1."""
    return CostedGraph.from_edges(4, [(0, 1), (1, 2), (1, 3), (2, 3)])


def hub_4_3() -> CostedGraph:
    """4-clique {0..3}, 3-clique {5, 6, 7}, hub 4 adjacent to every other node."""
    edges = list(itertools.combinations(range(4), 2))
    edges += list(itertools.combinations(range(5, 8), 2))
    edges += [(4, j) for j in range(8) if j != 4]
    return CostedGraph.from_edges(8, edges)


def barbell(clique: int = 4, bridge: int = 1) -> CostedGraph:
    """Two cliques joined by a path through ``bridge`` cut vertices.

    Nodes ``0..clique-1`` form the left clique, then the bridge nodes, then the
    right clique. Every path between the cliques crosses the bridge nodes.
    """
    left = list(range(clique))
    mid = list(range(clique, clique + bridge))
    right = list(range(clique + bridge, 2 * clique + bridge))
    edges = list(itertools.combinations(left, 2)) + list(itertools.combinations(right, 2))
    chain = [left[-1]] + mid + [right[0]]
    edges += list(zip(chain[:-1], chain[1:]))
    return CostedGraph.from_edges(2 * clique + bridge, edges)


def two_cliques(size: int = 10) -> CostedGraph:
    """Two ``size``-cliques joined by the single edge ``(size-1, size)``."""
    edges = list(itertools.combinations(range(size), 2))
    edges += list(itertools.combinations(range(size, 2 * size), 2))
    edges.append((size - 1, size))
    return CostedGraph.from_edges(2 * size, edges)


def random_tree(n: int, rng: np.random.Generator) -> CostedGraph:
    edges = [(i, int(rng.integers(0, i)), float(rng.uniform(0.5, 2.0))) for i in range(1, n)]
    return CostedGraph.from_edges(n, edges)


def random_connected(
    n: int,
    rng: np.random.Generator,
    density: float = 0.4,
    weighted: bool = True,
    independent_costs: bool = False,
) -> CostedGraph:
    """Random connected graph: a random spanning tree plus extra edges.

    Affinities are uniform on [0.5, 2] when ``weighted``; costs are either
    ``1/a`` or, with ``independent_costs``, drawn independently on [0.5, 2].
    """
    pairs = set()
    order = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        u, v = int(order[i]), int(order[j])
        pairs.add((min(u, v), max(u, v)))
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in pairs and rng.random() < density:
            pairs.add((u, v))
    edges = []
    for u, v in sorted(pairs):
        a = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        c = float(rng.uniform(0.5, 2.0)) if independent_costs else 1.0 / a
        edges.append((u, v, a, c))
    return CostedGraph(n, tuple(edges))


FIXTURES = {
    "k2": k2,
    "path3": path3,
    "triangle": triangle,
    "ext-triangle": extended_triangle,
    "hub-4-3": hub_4_3,
    "barbell": barbell,
    "two-cliques": two_cliques,
}


def get_fixture(name: str) -> CostedGraph:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None
