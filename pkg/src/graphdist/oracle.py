"""Brute-force references for the closed forms in :mod:`graphdist.rsp`.

Two oracles work on the same set of hitting walks (walks that reach the target
only at their last step):

* :func:`enumerate_hitting_paths` lists every such walk up to a length cap by
  depth-first search. It is literal but exponential.
* :func:`path_sums` sums the same walks length by length with a vector
  recursion, one length at a time, until the certified tail drops below a
  tolerance. Nothing is inverted, so it shares no code path with the
  fundamental-matrix route.

Both attach a rigorous upper bound on the omitted partition-function mass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEnsemble, EnsembleTooLarge, ParamOutOfRange, ValidationError
from .graph import CostedGraph, transition_matrix

MAX_PATHS = 10_000_000
MAX_TMAX = 40


@dataclass(frozen=True)
class PathEnsemble:
    """All hitting walks s -> t of length at most ``t_max``.

    ``ref_prob[i]`` is the product of natural-walk transition probabilities
    along ``paths[i]`` and ``cost[i]`` its summed edge cost. ``tail_bound``
    bounds the reference mass of longer hitting walks; since Boltzmann
    weights never exceed reference probabilities it bounds the omitted
    partition-function mass at every beta.
    """

    source: int
    target: int
    t_max: int
    paths: tuple
    ref_prob: np.ndarray
    cost: np.ndarray
    tail_bound: float

    def __len__(self):
        return len(self.paths)


def _check_pair(g, s, t):
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValidationError(f"nodes ({s}, {t}) outside 0..{g.n - 1}")
    g.require_connected()


def _absorbed_walk_mass(M: np.ndarray, s: int, t: int, steps: int) -> float:
    """Mass still alive away from t after ``steps`` steps of M with t absorbing."""
    x = np.zeros(M.shape[0])
    x[s] = 1.0
    if s == t:
        return 0.0
    for _ in range(steps):
        x = x @ M
        x[t] = 0.0
    return float(x.sum())


def enumerate_hitting_paths(g: CostedGraph, s: int, t: int, t_max: int, max_paths: int = MAX_PATHS) -> PathEnsemble:
    s, t, t_max = int(s), int(t), int(t_max)
    _check_pair(g, s, t)
    if not 0 <= t_max <= MAX_TMAX:
        raise ParamOutOfRange(f"t_max must lie in 0..{MAX_TMAX}, got {t_max}")
    P = transition_matrix(g)
    C = g.cost
    nbrs = [g.neighbors(i).tolist() for i in range(g.n)]
    if s == t:
        return PathEnsemble(s, t, t_max, ((t,),), np.ones(1), np.zeros(1), 0.0)

    paths, probs, costs = [], [], []
    # Explicit stack of (node, walk, prob, cost); DFS in neighbor order.
    stack = [(s, (s,), 1.0, 0.0)]
    while stack:
        node, walk, prob, cost = stack.pop()
        if len(walk) - 1 >= t_max:
            continue
        for j in reversed(nbrs[node]):
            pj = prob * P[node, j]
            cj = cost + C[node, j]
            w = walk + (j,)
            if j == t:
                paths.append(w)
                probs.append(pj)
                costs.append(cj)
                if len(paths) > max_paths:
                    raise EnsembleTooLarge(f"more than {max_paths} hitting paths with t_max={t_max}")
            else:
                stack.append((j, w, pj, cj))
    order = sorted(range(len(paths)), key=lambda i: (len(paths[i]), paths[i]))
    tail = _absorbed_walk_mass(P, s, t, t_max)
    return PathEnsemble(
        s,
        t,
        t_max,
        tuple(paths[i] for i in order),
        np.array([probs[i] for i in order]),
        np.array([costs[i] for i in order]),
        tail,
    )


@dataclass(frozen=True)
class PathSums:
    """Length-stratified Boltzmann sums over hitting walks s -> t at one beta.

    ``z = sum_w Pref(w) exp(-beta c(w))`` and ``cost_mass = sum_w (that) * c(w)``
    over walks of length at most ``t_max``; ``tail_bound`` bounds the omitted
    part of ``z``.
    """

    source: int
    target: int
    beta: float
    t_max: int
    z: float
    cost_mass: float
    tail_bound: float


def path_sums(
    g: CostedGraph,
    s: int,
    t: int,
    beta: float,
    t_max: int | None = None,
    tail_tol: float = 1e-13,
    max_steps: int = 200_000,
) -> PathSums:
    """Sum hitting walks by length until the tail bound is below ``tail_tol``.

    With ``t_max`` given, stop exactly there instead. The tail bound is the
    killed-walk mass that is still alive away from t: each surviving walk
    can add at most its own weight (times a hitting probability <= 1).
    """
    s, t = int(s), int(t)
    _check_pair(g, s, t)
    beta = float(beta)
    if not beta >= 0:
        raise ParamOutOfRange(f"beta must be nonnegative, got {beta}")
    if s == t:
        return PathSums(s, t, beta, 0, 1.0, 0.0, 0.0)
    P = transition_matrix(g)
    mask = g.mask
    W = np.zeros_like(P)
    W[mask] = P[mask] * np.exp(-beta * g.cost[mask])
    CW = g.cost * W
    a = np.zeros(g.n)
    b = np.zeros(g.n)
    a[s] = 1.0
    z_terms, c_terms = [], []
    limit = max_steps if t_max is None else int(t_max)
    steps = 0
    tail = 1.0
    while steps < limit:
        a, b = a @ W, b @ W + a @ CW
        steps += 1
        z_terms.append(a[t])
        c_terms.append(b[t])
        a[t] = 0.0
        b[t] = 0.0
        tail = math.fsum(a)
        if t_max is None and tail < tail_tol:
            break
    else:
        if t_max is None:
            raise EnsembleTooLarge(f"tail still {tail:.3g} after {max_steps} steps")
    return PathSums(s, t, beta, steps, math.fsum(z_terms), math.fsum(c_terms), tail)


def _weights(ens: PathEnsemble, beta: float) -> np.ndarray:
    if len(ens) == 0:
        raise DegenerateEnsemble(f"no hitting paths {ens.source} -> {ens.target} within t_max={ens.t_max}")
    return ens.ref_prob * np.exp(-float(beta) * ens.cost)


def oracle_partition_function(ens: PathEnsemble | PathSums, beta: float | None = None) -> float:
    if isinstance(ens, PathSums):
        return ens.z
    return math.fsum(_weights(ens, beta))


def oracle_expected_cost(ens: PathEnsemble | PathSums, beta: float | None = None) -> float:
    if isinstance(ens, PathSums):
        if ens.z <= 0:
            raise DegenerateEnsemble("zero partition function")
        return ens.cost_mass / ens.z
    w = _weights(ens, beta)
    return math.fsum(w * ens.cost) / math.fsum(w)


def oracle_relative_entropy(ens: PathEnsemble | PathSums, beta: float | None = None) -> float:
    """``sum_w P(w) log(P(w) / Pref(w))`` for the Boltzmann distribution P.

    Since ``log(P / Pref) = -beta c - log z`` on every walk, this equals
    ``-beta E[c] - log z``. For an explicit ensemble it is also summed term
    by term, which is what the literal definition asks for.
    """
    if isinstance(ens, PathSums):
        return -ens.beta * oracle_expected_cost(ens) - math.log(ens.z)
    w = _weights(ens, beta)
    z = math.fsum(w)
    prob = w / z
    keep = prob > 0
    return math.fsum(prob[keep] * np.log(prob[keep] / ens.ref_prob[keep]))


def oracle_tail_bound(g: CostedGraph, s: int, t: int, beta: float, t_max: int) -> float:
    """Bound on the partition-function mass of hitting walks longer than ``t_max``."""
    P = transition_matrix(g)
    mask = g.mask
    W = np.zeros_like(P)
    W[mask] = P[mask] * np.exp(-float(beta) * g.cost[mask])
    return _absorbed_walk_mass(W, int(s), int(t), int(t_max))


def sherman_morrison_zh(g: CostedGraph, beta: float, t: int) -> np.ndarray:
    """Column t of the hitting partition functions via a rank-one update.

    Making t absorbing removes row t of W: ``W_t = W - e_t w_t^T``. The
    Sherman-Morrison formula gives ``(I - W_t)^{-1}`` from ``Z = (I - W)^{-1}``
    and its column t is ``z^h_{.t}`` directly.
    """
    t = int(t)
    g.require_connected()
    if not 0 <= t < g.n:
        raise ValidationError(f"target {t} outside 0..{g.n - 1}")
    P = transition_matrix(g)
    mask = g.mask
    W = np.zeros_like(P)
    W[mask] = P[mask] * np.exp(-float(beta) * g.cost[mask])
    Z = np.linalg.inv(np.eye(g.n) - W)
    wt = W[t]
    Zet = Z[:, t]
    denom = 1.0 + wt @ Zet
    Zt_col = Zet - Zet * (wt @ Zet) / denom
    return Zt_col / Zt_col[t]


def first_passage_costs(g: CostedGraph, t: int) -> np.ndarray:
    """Expected cost of the natural walk from every node until it first hits t.

    Solves ``m_s = sum_j p_sj (c_sj + m_j)`` with ``m_t = 0``; summing both
    directions gives the commute cost without any Laplacian algebra.
    """
    t = int(t)
    g.require_connected()
    P = transition_matrix(g)
    rhs = (P * g.cost).sum(axis=1)
    keep = np.arange(g.n) != t
    A = np.eye(g.n - 1) - P[np.ix_(keep, keep)]
    m = np.zeros(g.n)
    m[keep] = np.linalg.solve(A, rhs[keep])
    return m


def commute_cost_oracle(g: CostedGraph) -> np.ndarray:
    cols = np.column_stack([first_passage_costs(g, t) for t in range(g.n)])
    return cols + cols.T
