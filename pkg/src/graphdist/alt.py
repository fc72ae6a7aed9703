"""Logarithmic forest distance and p-resistance distance."""
from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve

from .classic import DistanceMatrix, shortest_path
from .errors import GraphTooLarge, NumericalError, ParamOutOfRange, SolverNotConverged, ValidationError
from .graph import CostedGraph

PRES_MAX_NODES = 200
SMOOTHING = 1e-9
POLISH_SMOOTHING = (1e-12, 1e-15)


def log_forest(g: CostedGraph, alpha: float, gamma: float = 1.0) -> DistanceMatrix:
    """Logarithmic forest distance.

    ``Q = (I + alpha L)^{-1}``, ``M = gamma (alpha - 1) log_alpha Q`` taken
    elementwise, and ``D = (m 1^T + 1 m^T) / 2 - M`` with ``m = diag(M)``.
    At ``alpha = 1`` the factor ``(alpha - 1) / ln(alpha)`` is replaced by
    its limit 1.

    Only affinities enter (through L); edge costs are ignored by this family.
    Small alpha approaches the hop-count shortest path, large alpha a
    multiple of the resistance distance.
    """
    alpha, gamma = float(alpha), float(gamma)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise ParamOutOfRange(f"alpha must be positive, got {alpha}")
    if not (gamma > 0 and math.isfinite(gamma)):
        raise ParamOutOfRange(f"gamma must be positive, got {gamma}")
    g.require_connected()
    n = g.n
    L = np.diag(g.degrees) - g.affinity
    Q = solve(np.eye(n) + alpha * L, np.eye(n), assume_a="pos")
    Q = 0.5 * (Q + Q.T)
    if np.any(Q <= 0):
        raise NumericalError("forest accessibility underflowed to zero; raise alpha")
    if abs(alpha - 1.0) < 1e-12:
        factor = gamma
    else:
        factor = gamma * (alpha - 1.0) / math.log(alpha)
    M = factor * np.log(Q)
    m = np.diag(M)
    D = 0.5 * (m[:, None] + m[None, :]) - M
    return DistanceMatrix(D, "LOGFOR", {"alpha": alpha, "gamma": gamma})


# -- p-resistance -----------------------------------------------------------

@dataclass(frozen=True)
class FlowAssignment:
    """Unit s -> t flow, one signed current per edge.

    ``currents[e]`` flows from ``edges[e][0]`` to ``edges[e][1]`` (u < v);
    a negative value means the current runs v -> u.
    """

    currents: np.ndarray
    source: int
    target: int
    edges: tuple

    def net_outflow(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for (u, v, *_), i in zip(self.edges, self.currents):
            out[u] += i
            out[v] -= i
        return out

    def kirchhoff_residual(self, n: int) -> float:
        b = np.zeros(n)
        b[self.source] += 1.0
        b[self.target] -= 1.0
        return float(np.abs(self.net_outflow(n) - b).max())


class _CycleSpace:
    """Spanning-tree parametrization of unit flows: ``f = f0 + B y``."""

    def __init__(self, g: CostedGraph):
        n = g.n
        self.n = n
        u, v, _, _ = g.edge_array
        self.m = len(u)
        adj = [[] for _ in range(n)]
        for e, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
            adj[a].append((b, e))
            adj[b].append((a, e))
        parent = [-1] * n
        parent_edge = [-1] * n
        depth = [0] * n
        seen = [False] * n
        seen[0] = True
        queue = deque([0])
        tree = set()
        while queue:
            x = queue.popleft()
            for y, e in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    parent[y], parent_edge[y], depth[y] = x, e, depth[x] + 1
                    tree.add(e)
                    queue.append(y)
        self.parent, self.parent_edge, self.depth = parent, parent_edge, depth
        self.u, self.v = u, v
        chords = [e for e in range(self.m) if e not in tree]
        B = np.zeros((self.m, len(chords)))
        for k, e in enumerate(chords):
            a, b = int(u[e]), int(v[e])
            B[e, k] = 1.0
            # Close the cycle a -> b (chord) then b -> a through the tree.
            B[:, k] += self.tree_path_flow(b, a)
        self.B = B

    def tree_path_flow(self, x: int, y: int) -> np.ndarray:
        """Unit flow from x to y along the spanning tree, in edge orientation."""
        f = np.zeros(self.m)
        up, down = x, y
        while up != down:
            if self.depth[up] >= self.depth[down]:
                e = self.parent_edge[up]
                # Moving up -> parent[up].
                f[e] += 1.0 if self.u[e] == up else -1.0
                up = self.parent[up]
            else:
                e = self.parent_edge[down]
                # Flow enters `down` from parent[down].
                f[e] += 1.0 if self.v[e] == down else -1.0
                down = self.parent[down]
        return f


def _pres_objective(f, r, p):
    return float(np.sum(r * np.abs(f) ** p))


def p_resistance_pair(
    g: CostedGraph,
    s: int,
    t: int,
    p: float,
    tol: float = 1e-9,
    max_iter: int = 500,
    _space: _CycleSpace | None = None,
) -> tuple[float, FlowAssignment]:
    """Minimum of ``sum_e r_e |i_e|^p`` over unit flows from s to t.

    Edge resistances are the edge costs. Flows are parametrized on the cycle
    space of a BFS spanning tree, which makes Kirchhoff's laws hold by
    construction; the smoothed objective ``sum r (i^2 + eps^2)^(p/2)`` is
    minimized by damped Newton steps until the gradient norm is at most
    ``tol`` or the Newton decrement is below the resolution of the objective.
    ``p == 1`` is answered exactly by
    Dijkstra (all current on one cheapest path). Returns the true
    (unsmoothed) objective and the optimal flow.
    """
    p = float(p)
    if not 1.0 <= p <= 2.0:
        raise ParamOutOfRange(f"p must lie in [1, 2], got {p}")
    s, t = int(s), int(t)
    if s == t:
        raise ValidationError("p-resistance needs distinct source and target")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValidationError("node out of range")
    g.require_connected()
    space = _space if _space is not None else _CycleSpace(g)
    r = g.edge_array[3]

    if p == 1.0:
        f = _cheapest_path_flow(g, s, t)
        return _pres_objective(f, r, 1.0), FlowAssignment(f, s, t, g.edges)

    f0 = space.tree_path_flow(s, t)
    B = space.B
    y = np.zeros(B.shape[1])
    if B.shape[1] > 0:
        y = _newton(f0, B, r, p, y, SMOOTHING, tol, max_iter, (s, t))
        # Polish: shrink the smoothing and warm-start, keeping the flow with
        # the best true objective. Near p = 1 this removes the O(eps^p) bias.
        best = _pres_objective(f0 + B @ y, r, p)
        for eps in POLISH_SMOOTHING:
            try:
                y_eps = _newton(f0, B, r, p, y, eps, tol, max_iter, (s, t))
            except SolverNotConverged:
                break
            val = _pres_objective(f0 + B @ y_eps, r, p)
            if val < best:
                y, best = y_eps, val
    f = f0 + B @ y
    return _pres_objective(f, r, p), FlowAssignment(f, s, t, g.edges)


def _smoothed_change(f, df, r, p, eps2):
    """``F(f + df) - F(f)`` edge by edge, without cancelling the two totals.

    Uses ``q'^(p/2) - q^(p/2) = q^(p/2) expm1((p/2) log1p(dq / q))`` with
    ``dq = df (2 f + df)``, which stays accurate when the change is many
    orders of magnitude below F itself.
    """
    q = f * f + eps2
    dq = df * (2.0 * f + df)
    return float(np.sum(r * q ** (0.5 * p) * np.expm1(0.5 * p * np.log1p(dq / q))))


def _newton(f0, B, r, p, y, eps, tol, max_iter, pair):
    eps2 = eps * eps
    f = f0 + B @ y
    grad_norm = float("inf")
    for _ in range(max_iter):
        q = f * f + eps2
        d1 = r * p * f * q ** (0.5 * p - 1.0)
        d2 = r * p * q ** (0.5 * p - 2.0) * ((p - 1.0) * f * f + eps2)
        grad = B.T @ d1
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol:
            return y
        H = (B.T * d2) @ B
        try:
            step = -solve(H, grad, assume_a="pos")
        except np.linalg.LinAlgError:
            step = -grad
        decrement = float(-grad @ step)
        F = float(np.sum(r * q ** (0.5 * p)))
        # F - F* is about decrement / 2. Below ~1e-15 F the step is lost in the
        # rounding of the O(1) currents, so the flow is optimal to double
        # precision even if that rounding keeps the gradient above tol.
        if decrement <= 1e-15 * max(1.0, F):
            return y
        lam = 1.0
        while True:
            y_new = y + lam * step
            f_new = f0 + B @ y_new
            if _smoothed_change(f, f_new - f, r, p, eps2) <= -0.25 * lam * decrement:
                break
            lam *= 0.5
            if lam < 1e-20:
                # No representable flow improves F: at the precision floor if
                # the predicted gain is negligible, otherwise a genuine failure.
                if decrement <= 1e-12 * max(1.0, F):
                    return y
                raise SolverNotConverged(
                    f"p-resistance line search failed, gradient norm {grad_norm:.3g} (p={p}, pair={pair})",
                    grad_norm=grad_norm,
                )
        y, f = y_new, f_new
    raise SolverNotConverged(
        f"p-resistance solver stopped after {max_iter} iterations with gradient norm {grad_norm:.3g} (p={p}, pair={pair})",
        grad_norm=grad_norm,
    )


def _cheapest_path_flow(g: CostedGraph, s: int, t: int) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import dijkstra

    u, v, _, c = g.edge_array
    W = csr_matrix((c, (u, v)), shape=(g.n, g.n))
    _, pred = dijkstra(W, directed=False, indices=s, return_predecessors=True)
    index = {(int(a), int(b)): e for e, (a, b) in enumerate(zip(u.tolist(), v.tolist()))}
    f = np.zeros(len(u))
    x = t
    while x != s:
        y = int(pred[x])
        if y < 0:
            raise ValidationError(f"no path from {s} to {t}")
        if y < x:
            f[index[(y, x)]] += 1.0
        else:
            f[index[(x, y)]] -= 1.0
        x = y
    return f


def p_resistance(
    g: CostedGraph,
    p: float,
    tol: float = 1e-9,
    max_nodes: int = PRES_MAX_NODES,
    threads: int = 1,
) -> DistanceMatrix:
    """All-pairs p-resistance, one convex program per unordered pair."""
    p = float(p)
    if not 1.0 <= p <= 2.0:
        raise ParamOutOfRange(f"p must lie in [1, 2], got {p}")
    if g.n > max_nodes:
        raise GraphTooLarge(f"p-resistance solves n(n-1)/2 programs; n={g.n} exceeds the cap {max_nodes}")
    g.require_connected()
    if p == 1.0:
        return DistanceMatrix(shortest_path(g).values, "PRES", {"p": p})
    space = _CycleSpace(g)
    pairs = [(s, t) for s in range(g.n) for t in range(s + 1, g.n)]

    def job(st):
        return p_resistance_pair(g, st[0], st[1], p, tol=tol, _space=space)[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(job, pairs))
    else:
        values = [job(st) for st in pairs]
    D = np.zeros((g.n, g.n))
    for (s, t), val in zip(pairs, values):
        D[s, t] = D[t, s] = val
    return DistanceMatrix(D, "PRES", {"p": p})
