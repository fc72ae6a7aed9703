"""Labeling-rate sweep: tune on labeled nodes, score on the rest, rank methods."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .. import methods
from ..graph import CostedGraph
from .classify import LabelSet, accuracy, propagate_1nn, stratified_sample, tune_by_cv
from .stats import RankedMethod, copeland_rank

DEFAULT_RATES = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class EvalResult:
    # (dataset, rate) -> method -> accuracies, one per repeat.
    tables: dict
    # (dataset, rate) -> method -> tuned parameter per repeat (None if untuned).
    chosen: dict
    ranking: list[RankedMethod]


def evaluate(
    datasets: Mapping[str, tuple[CostedGraph, np.ndarray]],
    method_names: Sequence[str],
    rates: Sequence[float] = DEFAULT_RATES,
    repeats: int = 5,
    folds: int = 5,
    grid_points: int = 10,
    seed: int = 0,
    alpha: float = 0.05,
    **compute_kw,
) -> EvalResult:
    """For each dataset, rate and repeat: sample labeled nodes per class, tune
    the method's parameter by inner cross-validation on them, propagate to
    the unlabeled nodes and record the accuracy there."""
    fams = [methods.get_family(m) for m in method_names]
    tables, chosen = {}, {}
    root = np.random.SeedSequence(seed)
    for d_index, (dname, (g, truth)) in enumerate(sorted(datasets.items())):
        truth = np.asarray(truth, dtype=int)
        cache = {}

        def distances(fam, value):
            key = (fam.name, value)
            if key not in cache:
                params = {} if fam.param is None else {fam.param: value}
                cache[key] = methods.compute(g, fam.name, params, **compute_kw)
            return cache[key]

        for r_index, rate in enumerate(rates):
            key = f"{dname}@{rate:g}"
            tables[key] = {f.name: [] for f in fams}
            chosen[key] = {f.name: [] for f in fams}
            streams = np.random.SeedSequence(root.entropy, spawn_key=(d_index, r_index)).spawn(repeats)
            for ss in streams:
                rng = np.random.default_rng(ss)
                labeled = stratified_sample(truth, rate, rng)
                unlabeled = np.setdiff1d(np.arange(g.n), labeled)
                seeds = LabelSet.partial(truth, labeled)
                cv_seed = int(rng.integers(2**31))
                for fam in fams:
                    if fam.param is None or len(labeled) < 2:
                        value = None if fam.param is None else fam.defaults[fam.param]
                    else:
                        grid = [float(x) for x in methods.default_grid(fam.name, grid_points)]
                        value = tune_by_cv(lambda v, f=fam: distances(f, v), seeds, folds, grid, seed=cv_seed).best
                    D = distances(fam, value)
                    pred = propagate_1nn(D, seeds)
                    acc = accuracy(pred, truth, unlabeled) if unlabeled.size else 1.0
                    tables[key][fam.name].append(acc)
                    chosen[key][fam.name].append(value)
    ranking = copeland_rank(tables, alpha) if len(fams) >= 2 else []
    return EvalResult(tables, chosen, ranking)
