"""Copeland ranking of methods from pairwise one-sided Welch tests."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata, ttest_ind

from ..errors import ValidationError


@dataclass(frozen=True)
class RankedMethod:
    method: str
    rank: int
    score: int


def _beats(a: np.ndarray, b: np.ndarray, alpha: float) -> bool:
    """True when ``a`` is significantly greater than ``b`` at level ``alpha``."""
    if np.ptp(a) == 0 and np.ptp(b) == 0:
        # Both samples constant: the t statistic is undefined, compare means.
        return bool(a.mean() > b.mean())
    with warnings.catch_warnings():
        # Near-identical samples trigger a precision warning; the p-value is still usable.
        warnings.simplefilter("ignore", RuntimeWarning)
        res = ttest_ind(a, b, equal_var=False, alternative="greater")
    if np.isnan(res.pvalue):
        return bool(a.mean() > b.mean())
    return bool(res.pvalue < alpha)


def copeland_scores(tables: Mapping[str, Mapping[str, Sequence[float]]], alpha: float = 0.05) -> dict[str, int]:
    """Sum of +1 / -1 over all significant pairwise wins / losses in every table."""
    methods = None
    for name, table in tables.items():
        ms = sorted(table)
        if methods is None:
            methods = ms
        elif ms != methods:
            raise ValidationError(f"table {name!r} covers a different method set")
        if any(len(table[m]) == 0 for m in ms):
            raise ValidationError(f"table {name!r} has an empty sample")
    if not methods or len(methods) < 2:
        raise ValidationError("ranking needs at least two methods")
    score = {m: 0 for m in methods}
    for table in tables.values():
        samples = {m: np.asarray(table[m], dtype=float) for m in methods}
        for x, y in combinations(methods, 2):
            if _beats(samples[x], samples[y], alpha):
                score[x] += 1
                score[y] -= 1
            elif _beats(samples[y], samples[x], alpha):
                score[y] += 1
                score[x] -= 1
    return score


def copeland_rank(tables: Mapping[str, Mapping[str, Sequence[float]]], alpha: float = 0.05) -> list[RankedMethod]:
    """Rank methods by Copeland score; tied scores share the best rank."""
    score = copeland_scores(tables, alpha)
    names = sorted(score)
    ranks = rankdata([-score[m] for m in names], method="min").astype(int)
    out = [RankedMethod(m, int(r), score[m]) for m, r in zip(names, ranks)]
    return sorted(out, key=lambda r: (r.rank, r.method))
