"""Coordinate views of the simplex and Fisher information in coordinates.

The solid-simplex parametrization drops the first weight: an interior point
of the simplex over N = n + 1 states corresponds to eta in

    { eta in R^n : eta_j > 0, sum eta_j < 1 },

via pi(eta) = (1 - sum eta_j, eta_1, ..., eta_n).  In these coordinates the
Fisher information matrix and its inverse have closed forms:

    I(eta)      = diag(eta)^{-1} + (1 - sum eta)^{-1} 11^T,
    I(eta)^{-1} = diag(eta) - eta eta^T,
    det I(eta)^{-1} = (1 - sum eta) prod eta,

and the natural gradient in coordinates is I(eta)^{-1} times the Euclidean
coordinate gradient.  The exponential parametrization and the Fisher-Rao
metric of the square-root sphere embedding live here as well.
"""

from __future__ import annotations

import math

import numpy as np

from . import _linalg
from .errors import DomainError, SpaceMismatch, TangencyError
from .flows import _logsumexp
from .simplex import ProbabilityVector, SampleSpace


class SolidCoordinates:
    """A point of the open solid simplex: eta > 0 with sum(eta) < 1."""

    __slots__ = ("eta",)

    def __init__(self, eta):
        arr = np.array(eta, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise DomainError("eta must be a nonempty vector")
        if not np.all(np.isfinite(arr)):
            raise DomainError("eta must be finite")
        if np.any(arr <= 0.0):
            raise DomainError("every coordinate eta_j must be positive")
        if arr.sum() >= 1.0:
            raise DomainError(f"sum(eta) = {arr.sum()!r} must stay below 1")
        arr.flags.writeable = False
        object.__setattr__(self, "eta", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SolidCoordinates is immutable")

    @property
    def n(self) -> int:
        return self.eta.size

    def __repr__(self) -> str:
        return f"SolidCoordinates({np.array2string(self.eta, precision=6)})"


class FisherMatrix:
    """A symmetric positive-definite matrix in solid coordinates."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("Fisher matrix must be square")
        if float(np.max(np.abs(m - m.T))) > 1e-12:
            raise DomainError("Fisher matrix must be symmetric")
        _linalg.cholesky(m)  # positive definiteness gate
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def __setattr__(self, name, value):
        raise AttributeError("FisherMatrix is immutable")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, FisherMatrix):
            return self.entries @ other.entries
        return self.entries @ np.asarray(other, dtype=float)

    def __repr__(self) -> str:
        return f"FisherMatrix({np.array2string(self.entries, precision=6)})"


def _as_coords(eta) -> SolidCoordinates:
    return eta if isinstance(eta, SolidCoordinates) else SolidCoordinates(eta)


def solid_to_simplex(eta, space: SampleSpace | None = None) -> ProbabilityVector:
    """pi(eta) = (1 - sum eta, eta_1, ..., eta_n)."""
    coords = _as_coords(eta)
    if space is None:
        space = SampleSpace(coords.n + 1)
    elif space.size != coords.n + 1:
        raise SpaceMismatch("space size must be n + 1")
    w = np.concatenate(([1.0 - coords.eta.sum()], coords.eta))
    return ProbabilityVector(space, w)


def simplex_to_solid(p: ProbabilityVector) -> SolidCoordinates:
    """Inverse of :func:`solid_to_simplex`: drop the first weight."""
    return SolidCoordinates(p.weights[1:])


def fisher_matrix(eta) -> FisherMatrix:
    """Fisher information of the solid parametrization at eta."""
    coords = _as_coords(eta)
    e = coords.eta
    m = np.diag(1.0 / e) + 1.0 / (1.0 - e.sum())
    return FisherMatrix(m)


def fisher_inverse(eta) -> FisherMatrix:
    """Closed-form inverse diag(eta) - eta eta^T; no linear solve involved."""
    coords = _as_coords(eta)
    e = coords.eta
    return FisherMatrix(np.diag(e) - np.outer(e, e))


def fisher_inverse_det(eta) -> float:
    """Closed-form determinant of the inverse: (1 - sum eta) prod eta."""
    coords = _as_coords(eta)
    return float((1.0 - coords.eta.sum()) * np.prod(coords.eta))


def amari_natural_gradient(grad_tilde, eta) -> np.ndarray:
    """Coordinate natural gradient I(eta)^{-1} grad, via the closed form."""
    coords = _as_coords(eta)
    g = np.asarray(grad_tilde, dtype=float)
    if g.shape != (coords.n,):
        raise DomainError("coordinate gradient has the wrong length")
    e = coords.eta
    return e * g - e * float(np.dot(e, g))


def exponential_parametrization(theta) -> tuple[ProbabilityVector, float]:
    """Exponential family over the uniform base with indicator statistics.

    theta in R^n maps to p with p(0) = 1/(1 + sum exp theta) and
    p(j) = exp(theta_j) p(0); the log-normalizer relative to the uniform
    reference is psi(theta) = log(1 + sum exp theta) - log(n + 1).  Guarded
    by logsumexp, so large theta do not overflow.
    """
    th = np.asarray(theta, dtype=float)
    if th.ndim != 1 or th.size < 1:
        raise DomainError("theta must be a nonempty vector")
    if not np.all(np.isfinite(th)):
        raise DomainError("theta must be finite")
    n = th.size
    logits = np.concatenate(([0.0], th))
    lse = _logsumexp(logits)
    w = np.exp(logits - lse)
    psi = lse - math.log(n + 1)
    space = SampleSpace(n + 1)
    return ProbabilityVector._trusted(space, w), psi


def fisher_rao_metric(p: ProbabilityVector, u, v) -> float:
    """Fisher-Rao metric on embedded tangents: sum u(x) v(x) / p(x).

    Tangents of the embedded simplex sum to zero; vectors violating that
    (beyond 1e-12) raise :class:`TangencyError`.  For fibers U, V at p the
    identity g(U p, V p) = <U, V>_p connects this metric to the bundle inner
    product.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (p.size,) or v.shape != (p.size,):
        raise DomainError("tangent vectors must match the space size")
    for name, vec in (("u", u), ("v", v)):
        if abs(float(vec.sum())) > 1e-12:
            raise TangencyError(f"{name} is not tangent: sum = {float(vec.sum())!r}")
    return float(np.sum(u * v / p.weights))
