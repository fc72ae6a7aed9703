"""Planted-partition (stochastic block model) graphs."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import CouldNotConnect, ParamOutOfRange
from ..graph import CostedGraph

MAX_ATTEMPTS = 100


def gen_sbm(
    block_sizes: Sequence[int],
    p_in: float,
    p_out: float,
    seed: int = 0,
    max_attempts: int = MAX_ATTEMPTS,
) -> tuple[CostedGraph, np.ndarray]:
    """Unweighted SBM graph and its planted block labels.

    Each attempt draws from a fresh child stream of ``SeedSequence(seed)``;
    the first connected draw is returned.
    """
    sizes = [int(b) for b in block_sizes]
    if not sizes or any(b < 1 for b in sizes):
        raise ParamOutOfRange("block sizes must be positive")
    if not 0.0 <= p_out <= p_in <= 1.0:
        raise ParamOutOfRange(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    n = len(labels)
    iu, ju = np.triu_indices(n, 1)
    same = labels[iu] == labels[ju]
    prob = np.where(same, p_in, p_out)
    for ss in np.random.SeedSequence(seed).spawn(max_attempts):
        rng = np.random.default_rng(ss)
        keep = rng.random(len(iu)) < prob
        edges = tuple((int(u), int(v), 1.0, 1.0) for u, v in zip(iu[keep], ju[keep]))
        g = CostedGraph(n, edges)
        if g.connected:
            return g, labels
    raise CouldNotConnect(f"no connected draw in {max_attempts} attempts")
