"""Kernels built from distance matrices, and classical MDS coordinates."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ..classic import DistanceMatrix
from ..errors import DegenerateSigma, ParamOutOfRange, ValidationError
from ..graph import LaplacianPair

CENTERED = "CENTERED"
SIGMOID_CT = "SIGMOID_CT"


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Symmetric similarity matrix. Positive definiteness is not required."""

    values: np.ndarray
    kind: str
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        K = np.array(self.values, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValidationError("kernel must be square")
        K = 0.5 * (K + K.T)
        K.flags.writeable = False
        object.__setattr__(self, "values", K)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _as_array(D) -> np.ndarray:
    return np.asarray(D.values if isinstance(D, DistanceMatrix) else D, dtype=float)


def center_kernel(D: DistanceMatrix | np.ndarray) -> KernelMatrix:
    """``K = -1/2 H D H`` with ``H = I - 11^T/n``; distances are not squared."""
    Dv = _as_array(D)
    if Dv.ndim != 2 or Dv.shape[0] != Dv.shape[1]:
        raise ValidationError("distance matrix must be square")
    # H D H without forming H: subtract row means, column means, add grand mean.
    row = Dv.mean(axis=1, keepdims=True)
    col = Dv.mean(axis=0, keepdims=True)
    K = -0.5 * (Dv - row - col + Dv.mean())
    source = {"method": D.method, "params": dict(D.params)} if isinstance(D, DistanceMatrix) else {}
    return KernelMatrix(K, CENTERED, source)


def sigmoid_ct_kernel(lp: LaplacianPair, a: float) -> KernelMatrix:
    """Elementwise logistic of the scaled Laplacian pseudoinverse.

    ``K_st = 1 / (1 + exp(-a l+_st / sigma))`` where ``sigma`` is the
    population standard deviation of all n^2 entries of ``L+``.
    """
    a = float(a)
    if not a > 0:
        raise ParamOutOfRange(f"a must be positive, got {a}")
    sigma = float(np.std(lp.Lplus))
    if not sigma > 0:
        raise DegenerateSigma("L+ has zero spread; sigmoid scale undefined")
    K = expit(a * lp.Lplus / sigma)
    return KernelMatrix(K, SIGMOID_CT, {"method": "SIGCT", "params": {"a": a}, "sigma": sigma})


def psd_clip(K: KernelMatrix) -> KernelMatrix:
    """Project onto the PSD cone by zeroing negative eigenvalues."""
    w, V = np.linalg.eigh(K.values)
    Kc = (V * np.clip(w, 0.0, None)) @ V.T
    return KernelMatrix(Kc, K.kind, {**K.source, "psd_clip": True})


@dataclass(frozen=True)
class Embedding:
    coords: np.ndarray
    eigenvalues: np.ndarray
    # Dimensions whose eigenvalue was not positive and were zero-filled.
    zero_filled: tuple


def cmds_coordinates(D: DistanceMatrix | np.ndarray, d: int) -> Embedding:
    """Classical MDS: top-d eigenpairs of the centered kernel.

    Coordinates are eigenvectors scaled by the square roots of their
    eigenvalues; columns whose eigenvalue is not positive are zero-filled and
    listed in ``zero_filled``. Eigenvector signs are fixed so that the largest
    magnitude entry of each column is positive, which makes output
    reproducible across LAPACK builds.
    """
    K = center_kernel(D).values
    n = K.shape[0]
    d = int(d)
    if not 1 <= d <= max(n - 1, 1):
        raise ParamOutOfRange(f"d must lie in 1..{n - 1}, got {d}")
    w, V = np.linalg.eigh(K)
    order = np.argsort(w)[::-1][:d]
    w, V = w[order], V[:, order]
    tol = 1e-12 * max(1.0, float(np.abs(w).max(initial=0.0)))
    X = np.zeros((n, d))
    zero = []
    for j in range(d):
        if w[j] > tol:
            v = V[:, j]
            if v[np.argmax(np.abs(v))] < 0:
                v = -v
            X[:, j] = v * np.sqrt(w[j])
        else:
            zero.append(j)
    return Embedding(X, w, tuple(zero))
