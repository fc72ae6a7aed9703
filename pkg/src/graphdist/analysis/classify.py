"""Semi-supervised node classification by propagating nearest neighbors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..classic import DistanceMatrix
from ..errors import ParamOutOfRange, ValidationError

UNKNOWN = -1


@dataclass(frozen=True, eq=False)
class LabelSet:
    """Per-node class ids with a known/unknown mask.

    Unknown nodes carry ``UNKNOWN`` in ``labels``.
    """

    labels: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int).copy()
        mask = np.asarray(self.mask, dtype=bool).copy()
        if labels.shape != mask.shape or labels.ndim != 1:
            raise ValidationError("labels and mask must be 1-d and of equal length")
        labels[~mask] = UNKNOWN
        if np.any(labels[mask] < 0):
            raise ValidationError("known labels must be nonnegative class ids")
        labels.flags.writeable = False
        mask.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def full(cls, labels) -> "LabelSet":
        labels = np.asarray(labels, dtype=int)
        return cls(labels, np.ones(len(labels), dtype=bool))

    @classmethod
    def partial(cls, labels, known) -> "LabelSet":
        """Keep the labels of the nodes indexed (or masked) by ``known``."""
        labels = np.asarray(labels, dtype=int)
        mask = np.zeros(len(labels), dtype=bool)
        mask[np.asarray(known)] = True
        return cls(labels, mask)

    @property
    def n(self) -> int:
        return len(self.labels)


def propagate_1nn(D: DistanceMatrix | np.ndarray, seeds: LabelSet) -> LabelSet:
    """Label nodes one at a time, closest unlabeled node first.

    Each step picks the (unlabeled u, labeled v) pair with the smallest
    distance and copies v's label to u; ties go to smaller u, then smaller v.
    Each unlabeled node tracks its best labeled neighbor, so the whole run is
    O(n^2).
    """
    Dv = np.asarray(D.values if isinstance(D, DistanceMatrix) else D, dtype=float)
    n = seeds.n
    if Dv.shape != (n, n):
        raise ValidationError("distance matrix and label set sizes differ")
    known = seeds.mask.copy()
    if not known.any():
        raise ValidationError("propagation needs at least one labeled node")
    labels = seeds.labels.copy()
    big = np.iinfo(np.int64).max
    best_d = np.full(n, np.inf)
    best_v = np.full(n, big, dtype=np.int64)
    lab_idx = np.flatnonzero(known)
    sub = Dv[:, lab_idx]
    # Smallest distance, then smallest labeled index (argmin takes the first).
    pos = sub.argmin(axis=1)
    best_d[:] = sub[np.arange(n), pos]
    best_v[:] = lab_idx[pos]
    best_d[known] = np.inf
    remaining = int((~known).sum())
    while remaining:
        dmin = best_d.min()
        u = int(np.flatnonzero(best_d == dmin)[0])
        labels[u] = labels[best_v[u]]
        known[u] = True
        best_d[u] = np.inf
        remaining -= 1
        col = Dv[:, u]
        better = (~known) & ((col < best_d) | ((col == best_d) & (u < best_v)))
        best_d[better] = col[better]
        best_v[better] = u
    return LabelSet(labels, np.ones(n, dtype=bool))


def accuracy(pred: LabelSet, truth, nodes) -> float:
    nodes = np.asarray(nodes)
    if nodes.size == 0:
        return float("nan")
    return float(np.mean(pred.labels[nodes] == np.asarray(truth)[nodes]))


def stratified_folds(labels, nodes, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Split ``nodes`` into ``folds`` groups with classes spread evenly."""
    labels = np.asarray(labels)
    nodes = np.asarray(nodes)
    assign = np.empty(len(nodes), dtype=int)
    offset = 0
    for c in np.unique(labels[nodes]):
        idx = np.flatnonzero(labels[nodes] == c)
        idx = idx[rng.permutation(len(idx))]
        # Continue the round-robin across classes so small classes do not all land in fold 0.
        assign[idx] = (np.arange(len(idx)) + offset) % folds
        offset += len(idx)
    return [np.sort(nodes[assign == f]) for f in range(folds)]


def stratified_sample(labels, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Pick ``round(rate * size)`` nodes per class, at least one each."""
    if not 0.0 < rate <= 1.0:
        raise ParamOutOfRange(f"labeling rate must lie in (0, 1], got {rate}")
    labels = np.asarray(labels)
    chosen = []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        take = min(len(idx), max(1, int(round(rate * len(idx)))))
        chosen.append(rng.choice(idx, size=take, replace=False))
    return np.sort(np.concatenate(chosen))


@dataclass(frozen=True)
class CVResult:
    best: float
    grid: tuple
    scores: tuple


def tune_by_cv(
    family: Callable[[float], DistanceMatrix | np.ndarray],
    labels: LabelSet,
    folds: int,
    grid: Sequence[float],
    seed: int = 0,
) -> CVResult:
    """Pick the grid value whose distances give the best 1-NN accuracy.

    Only the known nodes of ``labels`` take part: each fold in turn is
    hidden, the rest seed :func:`propagate_1nn`, and accuracy is measured on
    the hidden fold. Ties go to the smaller parameter value.
    """
    folds = int(folds)
    if folds < 2:
        raise ParamOutOfRange("folds must be at least 2")
    grid = sorted(float(x) for x in grid)
    if not grid:
        raise ParamOutOfRange("grid must not be empty")
    known = np.flatnonzero(labels.mask)
    if len(known) < 2:
        raise ValidationError("cross-validation needs at least two labeled nodes")
    parts = stratified_folds(labels.labels, known, min(folds, len(known)), np.random.default_rng(seed))
    parts = [p for p in parts if p.size]
    truth = labels.labels
    if len(grid) == 1:
        return CVResult(grid[0], tuple(grid), (float("nan"),))
    scores = []
    for value in grid:
        D = family(value)
        accs = []
        for held in parts:
            train = np.setdiff1d(known, held)
            pred = propagate_1nn(D, LabelSet.partial(truth, train))
            accs.append(accuracy(pred, truth, held))
        scores.append(float(np.mean(accs)))
    best = grid[int(np.argmax(scores))]
    return CVResult(best, tuple(grid), tuple(scores))
