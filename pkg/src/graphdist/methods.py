"""Name -> distance family registry shared by the CLI and the analysis tools."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import alt, classic, rsp
from .classic import DistanceMatrix
from .errors import ValidationError
from .graph import CostedGraph, laplacian_pair


@dataclass(frozen=True)
class Family:
    name: str
    tag: str
    # Tunable parameter (the one swept by grids), or None.
    param: str | None
    defaults: dict
    grid: Callable[[int], np.ndarray] | None = None


def _geom(lo, hi):
    return lambda points: np.geomspace(lo, hi, points)


FAMILIES = {
    "sp": Family("sp", "SP", None, {}),
    "spu": Family("spu", "SPU", None, {}),
    "ct": Family("ct", "CT", None, {}),
    "cc": Family("cc", "CC", None, {}),
    "res": Family("res", "RES", None, {}),
    "spct": Family("spct", "SPCT", "lam", {"lam": 1.0}, lambda points: np.linspace(0.0, 1.0, points)),
    "rsp": Family("rsp", "RSP", "beta", {"beta": 0.02}, _geom(1e-4, 20.0)),
    "fe": Family("fe", "FE", "beta", {"beta": 0.07}, _geom(1e-4, 20.0)),
    "logfor": Family("logfor", "LOGFOR", "alpha", {"alpha": 0.95, "gamma": 1.0}, _geom(1e-2, 500.0)),
    "pres": Family("pres", "PRES", "p", {"p": 1.5}, _geom(1.0, 2.0)),
}

PARAMETRIZED = tuple(name for name, fam in FAMILIES.items() if fam.param is not None)


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name.lower()]
    except KeyError:
        raise ValidationError(f"unknown method {name!r}; choose from {', '.join(FAMILIES)}") from None


def resolve_params(name: str, given: dict | None = None) -> dict:
    """Fill defaults and reject parameters the method does not take."""
    fam = get_family(name)
    given = {k: v for k, v in (given or {}).items() if v is not None}
    extra = set(given) - set(fam.defaults)
    if extra:
        raise ValidationError(f"method {fam.name} does not take {', '.join(sorted(extra))}")
    out = dict(fam.defaults)
    out.update({k: float(v) for k, v in given.items()})
    return out


def compute(
    g: CostedGraph,
    name: str,
    params: dict | None = None,
    *,
    threads: int = 1,
    pres_tol: float = 1e-9,
    pres_cap: int = alt.PRES_MAX_NODES,
) -> DistanceMatrix:
    """Distance matrix of family ``name`` with ``params`` (defaults filled in)."""
    fam = get_family(name)
    p = resolve_params(name, params)
    if fam.name == "sp":
        return classic.shortest_path(g)
    if fam.name == "spu":
        return classic.shortest_path_unweighted(g)
    if fam.name in ("ct", "cc", "res"):
        lp = laplacian_pair(g)
        return {"ct": classic.commute_time, "cc": classic.commute_cost, "res": classic.resistance}[fam.name](lp)
    if fam.name == "spct":
        return classic.spct_combination(g, p["lam"])
    if fam.name == "rsp":
        return rsp.rsp(g, p["beta"])
    if fam.name == "fe":
        return rsp.free_energy(g, p["beta"])
    if fam.name == "logfor":
        return alt.log_forest(g, p["alpha"], p["gamma"])
    return alt.p_resistance(g, p["p"], tol=pres_tol, max_nodes=pres_cap, threads=threads)


def default_grid(name: str, points: int = 20) -> np.ndarray:
    fam = get_family(name)
    if fam.grid is None:
        raise ValidationError(f"method {fam.name} has no parameter to sweep")
    return fam.grid(points)
