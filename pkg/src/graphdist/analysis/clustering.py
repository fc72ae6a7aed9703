"""Kernel k-means and normalized mutual information."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyClusterUnrecoverable, ParamOutOfRange, ValidationError
from .kernels import KernelMatrix

MAX_ITER = 300
TIE_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Partition:
    """Hard assignment of n nodes to clusters ``0..k-1``.

    ``history`` holds the inertia after every iteration of the run that
    produced the partition (empty for partitions built from labels).
    """

    assignment: np.ndarray
    k: int
    inertia: float = float("nan")
    history: tuple = field(default=())

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=int).copy()
        a.flags.writeable = False
        object.__setattr__(self, "assignment", a)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels)
        _, inv = np.unique(labels, return_inverse=True)
        return cls(canonical(inv), int(inv.max()) + 1 if len(inv) else 0)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)


def canonical(labels) -> np.ndarray:
    """Relabel clusters in order of first appearance (0, 1, ...)."""
    labels = np.asarray(labels, dtype=int)
    mapping = {}
    out = np.empty_like(labels)
    for i, c in enumerate(labels.tolist()):
        out[i] = mapping.setdefault(c, len(mapping))
    return out


def _prototype_distances(K: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Squared embedding distance of every point to every cluster mean."""
    n = K.shape[0]
    M = np.zeros((n, k))
    M[np.arange(n), labels] = 1.0
    size = M.sum(axis=0)
    safe = np.where(size > 0, size, 1.0)
    KM = K @ M
    within = np.einsum("ic,ic->c", M, KM) / safe**2
    dist = np.diag(K)[:, None] - 2.0 * KM / safe + within[None, :]
    dist[:, size == 0] = np.inf
    return dist


def _inertia(K, labels, k) -> float:
    dist = _prototype_distances(K, labels, k)
    return float(dist[np.arange(len(labels)), labels].sum())


def _repair_empty(labels, dist, k):
    """Move the point farthest from its own prototype into each empty cluster."""
    labels = labels.copy()
    for _ in range(k):
        sizes = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(sizes == 0)
        if empty.size == 0:
            return labels
        own = dist[np.arange(len(labels)), labels].copy()
        # Only donors from clusters that keep at least one member.
        own[sizes[labels] <= 1] = -np.inf
        if not np.isfinite(own).any():
            break
        i = int(np.argmax(own))
        labels[i] = int(empty[0])
    if np.any(np.bincount(labels, minlength=k) == 0):
        raise EmptyClusterUnrecoverable(f"could not fill every one of {k} clusters")
    return labels


def _single_run(K: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    n = K.shape[0]
    # Random balanced assignment: every cluster starts non-empty.
    labels = rng.permutation(np.arange(n) % k)
    inertia = _inertia(K, labels, k)
    history = [inertia]
    for _ in range(max_iter):
        dist = _prototype_distances(K, labels, k)
        best = dist.argmin(axis=1)
        # Keep the current cluster when it ties the best one.
        stay = dist[np.arange(n), labels] <= dist[np.arange(n), best]
        new = np.where(stay, labels, best)
        new = _repair_empty(new, dist, k)
        if np.array_equal(new, labels):
            break
        new_inertia = _inertia(K, new, k)
        if new_inertia > inertia:
            # Only possible for indefinite kernels: keep the better partition.
            break
        labels, inertia = new, new_inertia
        history.append(inertia)
    return labels, inertia, tuple(history)


def kernel_kmeans(
    K: KernelMatrix | np.ndarray,
    k: int,
    restarts: int = 20,
    seed: int = 0,
    max_iter: int = MAX_ITER,
    threads: int = 1,
) -> Partition:
    """Best of ``restarts`` kernel k-means runs by within-cluster inertia.

    Each run starts from a random balanced assignment drawn from its own
    child stream of ``SeedSequence(seed)`` and iterates Lloyd steps in the
    kernel-induced space. Inertias within ``1e-10`` relative count as tied;
    ties go to the lexicographically smallest canonical labeling, so the
    result depends only on ``(K, k, restarts, seed)``.
    """
    Kv = np.asarray(K.values if isinstance(K, KernelMatrix) else K, dtype=float)
    n = Kv.shape[0]
    k = int(k)
    if not 2 <= k <= n:
        raise ParamOutOfRange(f"k must lie in 2..{n}, got {k}")
    if restarts < 1:
        raise ParamOutOfRange("restarts must be at least 1")
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(restarts)]

    def job(rng):
        return _single_run(Kv, k, rng, max_iter)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(job, streams))
    else:
        runs = [job(rng) for rng in streams]

    best = min(r[1] for r in runs)
    scale = max(abs(best), 1.0)
    tied = [r for r in runs if r[1] - best <= TIE_RTOL * scale]
    labels, inertia, history = min(tied, key=lambda r: tuple(canonical(r[0]).tolist()))
    return Partition(canonical(labels), k, inertia, history)


def _entropy(counts) -> float:
    total = math.fsum(counts)
    return -math.fsum(c / total * math.log(c / total) for c in counts if c > 0)


def _as_labels(x) -> np.ndarray:
    return x.assignment if isinstance(x, Partition) else np.asarray(x)


def nmi(X, Y) -> float:
    """``I(X, Y) / sqrt(H(X) H(Y))`` with natural logs; 0 if either entropy is 0."""
    x, y = _as_labels(X), _as_labels(Y)
    if x.shape != y.shape:
        raise ValidationError("partitions cover different node sets")
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    table = np.zeros((xi.max() + 1, yi.max() + 1))
    np.add.at(table, (xi, yi), 1.0)
    hx = _entropy(table.sum(axis=1))
    hy = _entropy(table.sum(axis=0))
    if hx == 0.0 or hy == 0.0:
        return 0.0
    n = float(len(x))
    px, py = table.sum(axis=1) / n, table.sum(axis=0) / n
    # Sorted summands make I(X, Y) and I(Y, X) bit-identical.
    terms = sorted(
        (table[i, j] / n) * math.log((table[i, j] / n) / (px[i] * py[j]))
        for i in range(table.shape[0])
        for j in range(table.shape[1])
        if table[i, j] > 0
    )
    mi = math.fsum(terms)
    return max(0.0, mi / math.sqrt(hx * hy))
