"""Classic node distances: shortest path (weighted and hop count), commute
time, commute cost, resistance, and the SP/resistance convex combination."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_sp

from .errors import ParamOutOfRange
from .graph import CostedGraph, LaplacianPair, laplacian_pair

METHODS = ("SP", "SPU", "CT", "CC", "RES", "SPCT", "RSP", "FE", "LOGFOR", "PRES")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Dense n x n distance matrix tagged with the method that produced it."""

    values: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        V = np.array(self.values, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise ValueError("distance matrix must be square")
        np.fill_diagonal(V, 0.0)
        V.flags.writeable = False
        object.__setattr__(self, "values", V)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __getitem__(self, idx):
        return self.values[idx]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape


def _sp(g: CostedGraph, unweighted: bool) -> np.ndarray:
    g.require_connected()
    u, v, _, c = g.edge_array
    W = csr_matrix((c, (u, v)), shape=(g.n, g.n))
    return _csgraph_sp(W, method="D", directed=False, unweighted=unweighted)


def shortest_path(g: CostedGraph) -> DistanceMatrix:
    """All-pairs minimal path cost (Dijkstra from every source)."""
    return DistanceMatrix(_sp(g, unweighted=False), "SP")


def shortest_path_unweighted(g: CostedGraph) -> DistanceMatrix:
    """All-pairs hop counts; costs are ignored."""
    return DistanceMatrix(_sp(g, unweighted=True), "SPU")


def _effective_resistance(lp: LaplacianPair) -> np.ndarray:
    d = np.diag(lp.Lplus)
    R = d[:, None] + d[None, :] - 2.0 * lp.Lplus
    np.fill_diagonal(R, 0.0)
    return R


def resistance(lp: LaplacianPair) -> DistanceMatrix:
    """Effective resistance with affinities as conductances."""
    return DistanceMatrix(_effective_resistance(lp), "RES")


def commute_time(lp: LaplacianPair) -> DistanceMatrix:
    """Expected round-trip length of the natural random walk.

    Computed as resistance times the graph volume ``sum_ij a_ij``, so
    ``resistance(lp) * lp.volume`` reproduces it bit for bit.
    """
    return DistanceMatrix(_effective_resistance(lp) * lp.volume, "CT")


def commute_cost(lp: LaplacianPair) -> DistanceMatrix:
    """Expected round-trip cost of the natural random walk.

    On an undirected graph this is the resistance scaled by
    ``sum_ij a_ij c_ij``; it differs from commute time only by the constant
    factor ``cost_volume / volume``.
    """
    return DistanceMatrix(_effective_resistance(lp) * lp.cost_volume, "CC")


def spct_combination(g: CostedGraph, lam: float, lp: LaplacianPair | None = None) -> DistanceMatrix:
    """``lam * SP + (1 - lam) * resistance`` for ``lam`` in [0, 1].

    Resistance rather than raw commute time is used for the second endpoint
    so that both terms live on the same scale.
    """
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ParamOutOfRange(f"lambda must lie in [0, 1], got {lam}")
    if lp is None:
        lp = laplacian_pair(g)
    sp = shortest_path(g).values
    res = _effective_resistance(lp)
    return DistanceMatrix(lam * sp + (1.0 - lam) * res, "SPCT", {"lam": lam})
