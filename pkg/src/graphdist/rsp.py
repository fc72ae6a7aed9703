"""Randomized shortest path (RSP) dissimilarity and free energy (FE) distance,
computed for all pairs at once.

The killed random walk ``W = P_ref * exp(-beta C)`` has fundamental matrix
``Z = (I - W)^{-1}``. The partition function of hitting paths from s to t is
``z_st / z_tt``, so one factorization serves every destination:

    Zh   = Z  Diag(Z)^{-1}
    S    = (Z (C * W) Z) / Z            (elementwise division)
    Cbar = S - 1 diag(S)^T              (directed expected hitting cost)
    Phi  = -log(Zh) / beta              (directed free energy)

RSP symmetrizes ``Cbar``; FE symmetrizes ``Phi``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .classic import DistanceMatrix
from .errors import BetaTooLarge, ParamOutOfRange, SingularSystem, UnderflowZ
from .graph import CostedGraph, transition_matrix

MAX_BETA_COST = 700.0
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class RspCore:
    beta: float
    W: np.ndarray
    Z: np.ndarray
    Zh: np.ndarray
    S: np.ndarray

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta

    @property
    def n(self) -> int:
        return self.W.shape[0]


def build_core(g: CostedGraph, beta: float) -> RspCore:
    beta = float(beta)
    if not beta > 0 or not np.isfinite(beta):
        raise ParamOutOfRange(f"beta must be positive and finite, got {beta}")
    g.require_connected()
    n = g.n
    mask = g.mask
    C = g.cost
    worst = beta * float(C[mask].max()) if g.m else 0.0
    if worst > MAX_BETA_COST:
        raise BetaTooLarge(f"beta * max edge cost = {worst:.4g} exceeds {MAX_BETA_COST:g}")
    P = transition_matrix(g)
    # Non-edges stay exactly 0: no "very large cost" placeholder is needed.
    W = np.zeros((n, n))
    W[mask] = P[mask] * np.exp(-beta * C[mask])
    if np.any(W.sum(axis=1) >= 1.0):
        raise SingularSystem("W is not strictly substochastic at this beta (beta too small for double precision)")

    M = np.eye(n) - W
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu = lu_factor(M, check_finite=False)
        except (LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
            raise SingularSystem(f"I - W could not be factorized: {exc}") from None
    Z = lu_solve(lu, np.eye(n), check_finite=False)
    if not np.all(np.isfinite(Z)):
        raise SingularSystem("non-finite entries in the fundamental matrix")
    resid = np.linalg.norm(M @ Z - np.eye(n)) / np.sqrt(n)
    if resid > RESIDUAL_TOL:
        raise SingularSystem(f"(I - W) Z = I residual {resid:.3g} above {RESIDUAL_TOL:g}")
    if np.any(Z <= 0):
        raise UnderflowZ("some z_st underflowed to zero; lower beta")

    dz = np.diag(Z)
    Zh = Z / dz[None, :]
    np.fill_diagonal(Zh, 1.0)
    S = (Z @ (C * W) @ Z) / Z
    for arr in (W, Z, Zh, S):
        arr.flags.writeable = False
    return RspCore(beta=beta, W=W, Z=Z, Zh=Zh, S=S)


def directed_expected_costs(core: RspCore) -> np.ndarray:
    """``Cbar[s, t]``: expected cost of the Boltzmann-weighted hitting paths s -> t."""
    S = core.S
    Cbar = S - np.diag(S)[None, :]
    np.fill_diagonal(Cbar, 0.0)
    return Cbar


def directed_free_energy(core: RspCore) -> np.ndarray:
    """``Phi[s, t] = -log(zh_st) / beta``."""
    if np.any(core.Zh <= 0):
        raise UnderflowZ("zero hitting partition function; pair unreachable at this precision")
    Phi = -np.log(core.Zh) / core.beta
    np.fill_diagonal(Phi, 0.0)
    return Phi


def rsp_dissimilarity(core: RspCore) -> DistanceMatrix:
    Cbar = directed_expected_costs(core)
    return DistanceMatrix(0.5 * (Cbar + Cbar.T), "RSP", {"beta": core.beta})


def free_energy_distance(core: RspCore) -> DistanceMatrix:
    Phi = directed_free_energy(core)
    return DistanceMatrix(0.5 * (Phi + Phi.T), "FE", {"beta": core.beta})


def relative_entropy_matrix(core: RspCore) -> np.ndarray:
    """Relative entropy of the optimal path distribution to the reference one.

    ``J[s, t] = -beta * Cbar[s, t] - log zh_st`` (directed, not symmetrized).
    """
    if np.any(core.Zh <= 0):
        raise UnderflowZ("zero hitting partition function; pair unreachable at this precision")
    J = -core.beta * directed_expected_costs(core) - np.log(core.Zh)
    np.fill_diagonal(J, 0.0)
    return J


def rsp(g: CostedGraph, beta: float) -> DistanceMatrix:
    return rsp_dissimilarity(build_core(g, beta))


def free_energy(g: CostedGraph, beta: float) -> DistanceMatrix:
    return free_energy_distance(build_core(g, beta))
