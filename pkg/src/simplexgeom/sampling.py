"""Seeded random generators for simplex points and fiber vectors.

Used by the invariant check suites and the test corpus; every draw goes
through a caller-supplied ``numpy.random.Generator`` so runs are
reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np

from .simplex import FiberVector, ProbabilityVector, RandomVariable, SampleSpace, center


def random_probability(
    rng: np.random.Generator, space: SampleSpace, low: float = 0.05
) -> ProbabilityVector:
    """A well-conditioned interior point: raw weights uniform on [low, 1]."""
    return ProbabilityVector.normalized(space, rng.uniform(low, 1.0, space.size))


def random_fiber(
    rng: np.random.Generator, p: ProbabilityVector, scale: float = 1.0
) -> FiberVector:
    """A centered fiber at p with raw values uniform on [-scale, scale]."""
    raw = rng.uniform(-scale, scale, p.size)
    return center(RandomVariable(p.space, raw), p)


def random_unit_fiber(
    rng: np.random.Generator, p: ProbabilityVector
) -> FiberVector:
    """A fiber at p normalized to unit fiber norm."""
    U = random_fiber(rng, p)
    n = U.norm()
    while n < 1e-8:  # essentially-zero draw; retry
        U = random_fiber(rng, p)
        n = U.norm()
    return U * (1.0 / n)
