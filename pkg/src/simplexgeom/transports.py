"""Parallel transports between fibers of the statistical bundle.

Three families of linear maps carry a fiber vector based at p to the fiber
at q:

* exponential transport: U -> U - E_q[U] (recentering),
* mixture transport:     U -> (p/q) U   (density-ratio rescaling),
* Hilbert transport:     a square-root-ratio map that preserves the fiber
  norm and is its own inverse across the pair (p, q).

The e/m pair forms dual semigroups; the h-transport is an isometry.  Every
function returns a fresh fiber re-based at q, so the base point always
travels with the value.  Nothing is cached; each call recomputes the ratios.
"""

from __future__ import annotations

import numpy as np

from .errors import SpaceMismatch
from .simplex import FiberVector, ProbabilityVector


def _check_spaces(U: FiberVector, q: ProbabilityVector) -> None:
    if U.base.space != q.space:
        raise SpaceMismatch("transport target lives on a different sample space")


def e_transport(U: FiberVector, q: ProbabilityVector) -> FiberVector:
    """Exponential transport to q: U - E_q[U]."""
    _check_spaces(U, q)
    return FiberVector(q, U.values - float(np.dot(q.weights, U.values)))


def m_transport(U: FiberVector, q: ProbabilityVector) -> FiberVector:
    """Mixture transport to q: (p/q) U, with p the base of U."""
    _check_spaces(U, q)
    return FiberVector(q, U.values * (U.base.weights / q.weights))


def h_transport(U: FiberVector, q: ProbabilityVector) -> FiberVector:
    """Hilbert (isometric) transport to q.

    With r = sqrt(p/q) the image is

        r U - (1 + E_q[r])^{-1} (1 + r) E_q[r U],

    which has zero q-mean and the same norm as U at p.  Transporting back
    from q to p recovers U.
    """
    _check_spaces(U, q)
    r = np.sqrt(U.base.weights / q.weights)
    mean_r = float(np.dot(q.weights, r))
    mean_ru = float(np.dot(q.weights, r * U.values))
    values = r * U.values - (1.0 + r) * (mean_ru / (1.0 + mean_r))
    return FiberVector(q, values)
