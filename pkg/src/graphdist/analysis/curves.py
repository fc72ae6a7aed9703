"""Distance-ratio curves over a parameter grid."""
from __future__ import annotations

import numpy as np

from .. import methods
from ..graph import CostedGraph


def ratio_curve(
    g: CostedGraph,
    method: str,
    grid=None,
    points: int = 20,
    pairs=((0, 1), (1, 2)),
    **compute_kw,
) -> np.ndarray:
    """Rows ``(param, D[pair0], D[pair1], D[pair0] / D[pair1])`` over the grid."""
    fam = methods.get_family(method)
    grid = methods.default_grid(method, points) if grid is None else np.asarray(grid, dtype=float)
    (a, b), (c, d) = pairs
    rows = []
    for value in grid:
        D = methods.compute(g, fam.name, {fam.param: float(value)}, **compute_kw)
        rows.append((float(value), D[a, b], D[c, d], D[a, b] / D[c, d]))
    return np.array(rows)
