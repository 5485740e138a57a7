"""Core objects of the statistical bundle over the open probability simplex.

A :class:`ProbabilityVector` is a strictly positive probability function on a
finite :class:`SampleSpace`; a :class:`FiberVector` is a random variable with
zero mean under its attached base point.  The inner product on each fiber is
``<U, V>_p = E_p[U V]``, and the basic functionals (entropy, Kullback-Leibler
divergence, expectations, numerical curve scores) live here as well.

All objects are immutable after construction and every operation is pure, so
values can be shared freely between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BaseMismatch,
    DomainError,
    DomainEscape,
    GeometryError,
    SpaceMismatch,
)

# Single documented comparison rule: probabilities are equal when their
# weights agree to EQ_TOL in max norm.
EQ_TOL = 1e-12
# Constructors repair drift up to DRIFT_TOL (renormalize / recenter); beyond
# that the input is considered corrupt rather than noisy.
DRIFT_TOL = 1e-6
# Open simplex only: weights at or below MIN_WEIGHT are rejected.
MIN_WEIGHT = 1e-300
# Enforced post-construction zero-mean tolerance for fibers.
CENTER_TOL = 1e-10


@dataclass(frozen=True)
class SampleSpace:
    """A finite sample space of ``size`` points, optionally labelled.

    Labels, when present, must be unique and match ``size``.
    """

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 2:
            raise DomainError(f"sample space needs an integer size >= 2, got {self.size}")
        object.__setattr__(self, "size", int(self.size))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.size:
                raise DomainError(
                    f"{len(labels)} labels for a space of {self.size} points"
                )
            if len(set(labels)) != len(labels):
                raise DomainError("sample space labels must be unique")
            object.__setattr__(self, "labels", labels)

    def label_list(self) -> list[str]:
        """Labels, generating ``x0..x{N-1}`` when none were given."""
        if self.labels is not None:
            return list(self.labels)
        return [f"x{i}" for i in range(self.size)]


def _as_values(values, size: int) -> np.ndarray:
    # Always copies so that freezing the result never touches caller arrays.
    arr = np.array(values, dtype=float, copy=True)
    if arr.shape != (size,):
        raise DomainError(f"expected {size} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("values must be finite")
    return arr


class ProbabilityVector:
    """A strictly positive probability function, a point of the open simplex.

    The constructor accepts weights whose sum drifts from 1 by at most
    ``DRIFT_TOL`` and renormalizes them; weights that are not strictly
    positive are rejected.  Use :meth:`normalized` to build a point from an
    arbitrary positive vector.
    """

    __slots__ = ("space", "weights", "_log_weights")

    def __init__(self, space: SampleSpace, weights):
        w = _as_values(weights, space.size)
        if np.any(w <= MIN_WEIGHT):
            raise DomainError("weights must be strictly positive")
        s = float(w.sum())
        if abs(s - 1.0) > DRIFT_TOL:
            raise DomainError(
                f"weights sum to {s!r}; drift beyond {DRIFT_TOL} is an error"
            )
        w = w / s
        w.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_log_weights", None)

    def __setattr__(self, name, value):
        raise AttributeError("ProbabilityVector is immutable")

    @classmethod
    def normalized(cls, space: SampleSpace, weights) -> "ProbabilityVector":
        """Build a point from any finite, strictly positive weight vector."""
        w = _as_values(weights, space.size)
        if np.any(w <= 0.0):
            raise DomainError("weights must be strictly positive")
        return cls(space, w / w.sum())

    @classmethod
    def uniform(cls, space: SampleSpace) -> "ProbabilityVector":
        return cls._trusted(space, np.full(space.size, 1.0 / space.size))

    @classmethod
    def _trusted(cls, space: SampleSpace, weights: np.ndarray) -> "ProbabilityVector":
        # Internal fast path for weights that are normalized and positive by
        # construction (softmax outputs, closed-form curves).
        self = object.__new__(cls)
        weights = np.asarray(weights, dtype=float)
        weights.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_log_weights", None)
        return self

    @property
    def size(self) -> int:
        return self.space.size

    @property
    def log_weights(self) -> np.ndarray:
        lw = self._log_weights
        if lw is None:
            lw = np.log(self.weights)
            lw.flags.writeable = False
            object.__setattr__(self, "_log_weights", lw)
        return lw

    def expectation(self, values) -> float:
        """E_p[values] for a plain array, RandomVariable or FiberVector."""
        if isinstance(values, (RandomVariable, FiberVector)):
            values = values.values
        return float(np.dot(self.weights, values))

    def max_distance(self, other: "ProbabilityVector") -> float:
        if self.space != other.space:
            raise SpaceMismatch("points on different sample spaces")
        return float(np.max(np.abs(self.weights - other.weights)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbabilityVector):
            return NotImplemented
        return self.space == other.space and self.max_distance(other) <= EQ_TOL

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProbabilityVector({np.array2string(self.weights, precision=6)})"


@dataclass(frozen=True, eq=False)
class RandomVariable:
    """A real function on a sample space; no moment constraints."""

    space: SampleSpace
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_values(self.values, self.space.size))
        self.values.flags.writeable = False


class FiberVector:
    """An element of the fiber at ``base``: zero mean under the base point.

    The constructor recenters values whose mean under the base drifts by at
    most ``DRIFT_TOL``; larger drift is an error (use :func:`center` to
    project an arbitrary random variable onto the fiber).
    """

    __slots__ = ("base", "values")

    def __init__(self, base: ProbabilityVector, values):
        v = _as_values(values, base.size)
        m = float(np.dot(base.weights, v))
        if abs(m) > DRIFT_TOL:
            raise DomainError(
                f"fiber values have mean {m!r} under the base; "
                f"drift beyond {DRIFT_TOL} is an error"
            )
        if m != 0.0:
            v = v - m
        v.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("FiberVector is immutable")

    @classmethod
    def zero(cls, base: ProbabilityVector) -> "FiberVector":
        return cls._trusted(base, np.zeros(base.size))

    @classmethod
    def _trusted(cls, base: ProbabilityVector, values: np.ndarray) -> "FiberVector":
        self = object.__new__(cls)
        values = np.asarray(values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "values", values)
        return self

    def norm(self) -> float:
        """The fiber norm ||U||_p = sqrt(E_p[U^2])."""
        return math.sqrt(float(np.dot(self.base.weights, self.values**2)))

    def _same_fiber(self, other: "FiberVector") -> None:
        if not isinstance(other, FiberVector):
            raise BaseMismatch("expected a FiberVector")
        if self.base.space != other.base.space:
            raise BaseMismatch("fibers live on different sample spaces")
        if self.base.max_distance(other.base) > EQ_TOL:
            raise BaseMismatch("fibers attached to different base points")

    def __add__(self, other: "FiberVector") -> "FiberVector":
        self._same_fiber(other)
        return FiberVector(self.base, self.values + other.values)

    def __sub__(self, other: "FiberVector") -> "FiberVector":
        self._same_fiber(other)
        return FiberVector(self.base, self.values - other.values)

    def __mul__(self, scalar: float) -> "FiberVector":
        return FiberVector._trusted(self.base, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "FiberVector":
        return FiberVector._trusted(self.base, -self.values)

    def __repr__(self) -> str:
        return f"FiberVector({np.array2string(self.values, precision=6)})"


def inner_product(U: FiberVector, V: FiberVector) -> float:
    """Fiber inner product <U, V>_p = E_p[U V]; bases must agree."""
    U._same_fiber(V)
    return float(np.dot(U.base.weights, U.values * V.values))


def center(f: RandomVariable, p: ProbabilityVector) -> FiberVector:
    """Project a random variable onto the fiber at p: f - E_p[f]."""
    if f.space != p.space:
        raise SpaceMismatch("random variable and point on different spaces")
    return FiberVector(p, f.values - float(np.dot(p.weights, f.values)))


def entropy(p: ProbabilityVector) -> float:
    """Shannon entropy -sum p log p; maximal (= log N) at the uniform point."""
    return float(-np.dot(p.weights, p.log_weights))


def kl(p: ProbabilityVector, q: ProbabilityVector) -> float:
    """Kullback-Leibler divergence sum p log(p/q); >= 0, zero iff p == q."""
    if p.space != q.space:
        raise SpaceMismatch("divergence needs both points on one space")
    return float(np.dot(p.weights, p.log_weights - q.log_weights))


def score_of_curve(
    curve: Callable[[float], ProbabilityVector], t: float, h: float
) -> FiberVector:
    """Central-difference estimate of the score d/dt log p(t) at ``t``.

    The estimate is recentered at p(t); for curves with analytic scores the
    error is O(h^2).  Raises :class:`DomainEscape` when the curve cannot be
    evaluated inside the open simplex at ``t`` or ``t +- h``.
    """
    if h <= 0:
        raise DomainError("step h must be positive")
    p0, p_minus, p_plus = _eval_curve_window(curve, t, h)
    ds = (p_plus.log_weights - p_minus.log_weights) / (2.0 * h)
    return FiberVector(p0, ds - float(np.dot(p0.weights, ds)))


def _eval_curve_window(curve, t, h):
    """Evaluate a simplex curve at t and t +- h, mapping failures to DomainEscape."""
    out = []
    for s in (t, t - h, t + h):
        try:
            point = curve(s)
        except GeometryError as exc:
            raise DomainEscape(f"curve not evaluable in the open simplex at t={s}: {exc}") from exc
        if not isinstance(point, ProbabilityVector):
            raise DomainEscape(f"curve returned {type(point).__name__} at t={s}")
        out.append(point)
    if out[0].space != out[1].space or out[0].space != out[2].space:
        raise DomainEscape("curve changed sample space across the difference window")
    return out


def probability_to_json(p: ProbabilityVector) -> str:
    """Serialize a point as {"labels": [...], "weights": [...]}.

    Weights are written with 17 significant digits, which round-trips IEEE
    doubles exactly.
    """
    labels = json.dumps(p.space.label_list())
    weights = ", ".join(f"{w:.17g}" for w in p.weights)
    return f'{{"labels": {labels}, "weights": [{weights}]}}'


def probability_from_json(text: str) -> ProbabilityVector:
    """Inverse of :func:`probability_to_json`."""
    try:
        obj = json.loads(text)
        labels = obj["labels"]
        weights = obj["weights"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DomainError(f"malformed probability JSON: {exc}") from exc
    space = SampleSpace(len(labels), tuple(labels))
    return ProbabilityVector(space, weights)
