"""Costed undirected graphs and the linear-algebra primitives shared by every
distance family: the natural random walk and the Laplacian pseudoinverse.

A graph carries two independent edge attributes: an affinity ``a_uv`` (drives
the random walk and the Laplacian) and a cost ``c_uv`` (what a path pays).
When no cost is given it defaults to ``1 / a_uv``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    DuplicateEdge,
    IsolatedNode,
    NonPositiveWeight,
    ParseError,
    SelfLoop,
    ValidationError,
)

Edge = tuple[int, int, float, float]


@dataclass(frozen=True)
class CostedGraph:
    """Undirected graph with per-edge affinity and cost.

    Edges are normalized so that ``u < v``; each unordered pair appears once.
    ``connected`` is computed at construction.
    """

    n: int
    edges: tuple[Edge, ...]
    connected: bool = field(init=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValidationError(f"node count must be positive, got {n}")
        seen = set()
        norm = []
        for e in self.edges:
            u, v, a, c = int(e[0]), int(e[1]), float(e[2]), float(e[3])
            if u == v:
                raise SelfLoop(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            if not (a > 0 and math.isfinite(a)):
                raise NonPositiveWeight(f"affinity of edge ({u}, {v}) must be positive and finite, got {a}")
            if not (c > 0 and math.isfinite(c)):
                raise NonPositiveWeight(f"cost of edge ({u}, {v}) must be positive and finite, got {c}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdge(f"edge {key} listed twice")
            seen.add(key)
            norm.append((key[0], key[1], a, c))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "connected", _is_connected(n, norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], default_cost: str = "reciprocal") -> "CostedGraph":
        """Build from ``(u, v)``, ``(u, v, a)`` or ``(u, v, a, c)`` tuples.

        Missing affinities default to 1; missing costs to ``1/a``
        (``default_cost="reciprocal"``) or 1 (``"unit"``).
        """
        out = []
        for e in edges:
            u, v = e[0], e[1]
            a = float(e[2]) if len(e) > 2 else 1.0
            if len(e) > 3:
                c = float(e[3])
            elif default_cost == "unit":
                c = 1.0
            else:
                c = 1.0 / a if a > 0 else float("nan")
            out.append((u, v, a, c))
        return cls(n, tuple(out))

    @classmethod
    def from_matrices(cls, A: np.ndarray, C: np.ndarray | None = None) -> "CostedGraph":
        """Build from a symmetric affinity matrix and optional cost matrix."""
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError("affinity matrix must be square")
        if not np.array_equal(A, A.T):
            raise ValidationError("affinity matrix must be symmetric")
        if C is not None:
            C = np.asarray(C, dtype=float)
            if C.shape != A.shape or not np.array_equal(C, C.T):
                raise ValidationError("cost matrix must be symmetric and match A")
        iu, ju = np.nonzero(np.triu(A, 1))
        if np.any(np.diag(A) != 0):
            raise SelfLoop("affinity matrix has a nonzero diagonal")
        edges = []
        for i, j in zip(iu.tolist(), ju.tolist()):
            a = A[i, j]
            c = C[i, j] if C is not None else 1.0 / a
            edges.append((i, j, a, c))
        return cls(A.shape[0], tuple(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if not self.edges:
            e = np.zeros(0)
            return e.astype(int), e.astype(int), e, e
        u, v, a, c = zip(*self.edges)
        return np.array(u), np.array(v), np.array(a), np.array(c)

    @cached_property
    def affinity(self) -> np.ndarray:
        """Dense symmetric affinity matrix A (zero off-edges)."""
        u, v, a, _ = self.edge_array
        A = np.zeros((self.n, self.n))
        A[u, v] = a
        A[v, u] = a
        A.flags.writeable = False
        return A

    @cached_property
    def cost(self) -> np.ndarray:
        """Dense symmetric cost matrix C. Non-edges hold 0 and must be masked by ``mask``."""
        u, v, _, c = self.edge_array
        C = np.zeros((self.n, self.n))
        C[u, v] = c
        C[v, u] = c
        C.flags.writeable = False
        return C

    @cached_property
    def mask(self) -> np.ndarray:
        M = self.affinity > 0
        M.flags.writeable = False
        return M

    @cached_property
    def degrees(self) -> np.ndarray:
        d = self.affinity.sum(axis=1)
        d.flags.writeable = False
        return d

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.mask[i])

    def require_connected(self) -> None:
        if not self.connected:
            raise Disconnected("operation requires a connected graph")

    def sha256(self) -> str:
        return hashlib.sha256(dumps_graph(self).encode("utf-8")).hexdigest()


def _is_connected(n: int, edges) -> bool:
    if n == 1:
        return True
    if not edges:
        return False
    u, v = [e[0] for e in edges], [e[1] for e in edges]
    adj = coo_matrix((np.ones(len(u)), (u, v)), shape=(n, n))
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp == 1


# -- edge-list TSV ----------------------------------------------------------

def parse_graph(text: str, n: int | None = None) -> CostedGraph:
    """Parse the edge-list TSV format: ``u<TAB>v<TAB>affinity[<TAB>cost]``.

    Blank lines and ``#`` comments are skipped. A ``# nodes=<n>`` comment fixes
    the node count (needed for trailing isolated nodes); otherwise ``n`` is
    one more than the largest id seen.
    """
    edges = []
    declared = n
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes="):
                try:
                    declared = int(body[len("nodes="):])
                except ValueError:
                    raise ParseError(f"bad node count directive {body!r}", lineno) from None
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) not in (3, 4):
            raise ParseError(f"expected 3 or 4 fields, got {len(parts)}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
            a = float(parts[2])
            c = float(parts[3]) if len(parts) == 4 else None
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if u < 0 or v < 0:
            raise ParseError("node ids must be nonnegative", lineno)
        if u == v:
            raise SelfLoop(f"line {lineno}: self-loop on node {u}")
        if not (a > 0 and math.isfinite(a)):
            raise NonPositiveWeight(f"line {lineno}: affinity must be positive, got {parts[2]}")
        if c is None:
            c = 1.0 / a
        elif not (c > 0 and math.isfinite(c)):
            raise NonPositiveWeight(f"line {lineno}: cost must be positive, got {parts[3]}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"line {lineno}: edge {key} already given on line {seen[key]}")
        seen[key] = lineno
        edges.append((u, v, a, c))
    top = max((max(e[0], e[1]) for e in edges), default=-1) + 1
    if declared is None:
        declared = max(top, 1)
    elif declared < top:
        raise ParseError(f"declared {declared} nodes but ids reach {top - 1}")
    return CostedGraph(declared, tuple(edges))


def load_graph(path: str | Path) -> CostedGraph:
    return parse_graph(Path(path).read_text())


def dumps_graph(g: CostedGraph) -> str:
    lines = [f"# nodes={g.n}"]
    for u, v, a, c in g.edges:
        lines.append(f"{u}\t{v}\t{a!r}\t{c!r}")
    return "\n".join(lines) + "\n"


def save_graph(g: CostedGraph, path: str | Path) -> None:
    Path(path).write_text(dumps_graph(g))


# -- shared primitives ------------------------------------------------------

def transition_matrix(g: CostedGraph) -> np.ndarray:
    """Natural random walk ``P = D^{-1} A``."""
    d = g.degrees
    if np.any(d <= 0):
        raise IsolatedNode(f"node {int(np.argmin(d))} has no edges")
    return g.affinity / d[:, None]


@dataclass(frozen=True)
class LaplacianPair:
    L: np.ndarray
    Lplus: np.ndarray
    volume: float
    cost_volume: float


def laplacian_pair(g: CostedGraph) -> LaplacianPair:
    """Laplacian ``L = D - A`` and its Moore-Penrose pseudoinverse.

    The pseudoinverse comes from a full symmetric eigendecomposition with the
    single zero eigenvalue dropped. More than one eigenvalue below
    ``1e-10 * ||L||`` means the graph is disconnected.
    """
    A = g.affinity
    L = np.diag(g.degrees) - A
    evals, evecs = np.linalg.eigh(L)
    scale = max(float(np.abs(evals).max()), 1.0) if g.n > 1 else 1.0
    zero = np.abs(evals) <= 1e-10 * scale
    if zero.sum() > 1 or not g.connected:
        raise Disconnected(f"Laplacian has {int(zero.sum())} zero eigenvalues")
    inv = np.zeros_like(evals)
    inv[~zero] = 1.0 / evals[~zero]
    Lplus = (evecs * inv) @ evecs.T
    Lplus = 0.5 * (Lplus + Lplus.T)
    volume = float(A.sum())
    cost_volume = float((A * g.cost).sum())
    return LaplacianPair(L=L, Lplus=Lplus, volume=volume, cost_volume=cost_volume)


# -- matrix output ----------------------------------------------------------

def write_matrix_csv(M: np.ndarray, path: str | Path) -> None:
    """n rows x m columns, 17 significant digits, no header."""
    np.savetxt(path, np.atleast_2d(np.asarray(M, dtype=float)), fmt="%.17g", delimiter=",")


def read_matrix_csv(path: str | Path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))


def write_meta(path: str | Path, method: str, params: dict, g: CostedGraph) -> Path:
    """Write the ``<output>.meta.json`` sidecar next to a matrix file."""
    meta_path = Path(str(path) + ".meta.json")
    meta = {"method": method, "params": params, "n": g.n, "graph_sha256": g.sha256()}
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta_path
