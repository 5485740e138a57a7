"""Deformed logarithms, the q-score, and generalized entropy.

A positive slope function A on (0, oo) defines the deformed logarithm

    log_A(x) = integral_1^x du / A(u),

a strictly increasing function with log_A(1) = 0, concave whenever A is
increasing; exp_A is its inverse and satisfies exp_A'(y) = A(exp_A(y)).

Built-in families:

* power(q):  A(u) = u^q.  For q != 1 the pair is
      ln_q(x)  = (x^(1-q) - 1) / (1 - q),
      exp_q(y) = (1 + (1 - q) y)^(1/(1-q)),
  the inverse pair of the stated ln_q (exp_q(0) = 1); q = 1 is the natural
  log/exp, special-cased analytically everywhere.
* kaniadakis: log(x) = (x - 1/x) / 2 = sinh(ln x), with A(u) = 2u^2/(1+u^2).
* newton:     log(x) = ln x + x - 1, with A(u) = u/(1+u).
* custom(A):  log by adaptive Simpson quadrature, exp by bracketed Newton.

The q-score of a curve is d/dt ln_q p(t) = p'(t)/p(t)^q; it is orthogonal to
constants in the p^q weighting, which is the defining constraint of the
q-deformed bundle.  The matching entropy is the Tsallis entropy
H_q(p) = (-1 + sum p^q) / (1 - q), with the Shannon entropy as its q -> 1
limit.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError, RangeError
from .simplex import ProbabilityVector, entropy, score_of_curve, _eval_curve_window


# ---------------------------------------------------------------------------
# Quadrature and inversion helpers for custom slope functions


def _adaptive_simpson(func, a: float, b: float, tol: float = 1e-10) -> float:
    def simpson(x0, x2, f0, f2):
        x1 = 0.5 * (x0 + x2)
        f1 = func(x1)
        return x1, f1, (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f2, whole, x1, f1, eps, depth):
        lm, flm, left = simpson(x0, x1, f0, f1)
        rm, frm, right = simpson(x1, x2, f1, f2)
        if depth > 48 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, x1, f0, f1, left, lm, flm, 0.5 * eps, depth + 1) + recurse(
            x1, x2, f1, f2, right, rm, frm, 0.5 * eps, depth + 1
        )

    if a == b:
        return 0.0
    f0, f2 = func(a), func(b)
    x1, f1, whole = simpson(a, b, f0, f2)
    return recurse(a, b, f0, f2, whole, x1, f1, tol, 0)


def _invert_increasing(func, y: float, deriv=None, tol: float = 1e-13) -> float:
    """Solve func(x) = y for increasing func on (0, oo) with func(1) = 0.

    Expanding bracket around 1, then Newton steps guarded by bisection; the
    bracket never opens, so 200 iterations always pin the root.
    """
    if y == 0.0:
        return 1.0
    lo, hi = 1.0, 1.0
    if y > 0.0:
        while func(hi) < y:
            hi *= 2.0
            if hi > 1e280:
                raise RangeError(f"{y!r} is above the range of this logarithm")
        lo = hi * 0.5
    else:
        while func(lo) > y:
            lo *= 0.5
            if lo < 1e-280:
                raise RangeError(f"{y!r} is below the range of this logarithm")
        hi = lo * 2.0
    x = 0.5 * (lo + hi)
    for _ in range(200):
        r = func(x) - y
        if r > 0.0:
            hi = x
        else:
            lo = x
        if abs(r) <= 1e-15 * max(1.0, abs(y)):
            return x
        slope = deriv(x) if deriv is not None else None
        candidate = x - r / slope if slope and slope > 0.0 else 0.5 * (lo + hi)
        x = candidate if lo < candidate < hi else 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, x):
            return x
    return x


# ---------------------------------------------------------------------------
# Deformed logarithm families


class DeformedLog:
    """A deformed logarithm/exponential pair generated by a slope function A."""

    def __init__(self, kind: str, q: float | None = None, slope: Callable[[float], float] | None = None):
        if kind not in ("power", "kaniadakis", "newton", "custom"):
            raise DomainError(f"unknown deformed-log kind {kind!r}")
        if kind == "power" and q is None:
            raise DomainError("power logarithm needs the exponent q")
        if kind == "custom":
            if slope is None:
                raise DomainError("custom logarithm needs a slope function A")
            for probe in (0.5, 1.0, 2.0):
                if slope(probe) <= 0.0:
                    raise DomainError("slope function A must be positive on (0, oo)")
        self.kind = kind
        self.q = float(q) if q is not None else None
        self._slope = slope

    @classmethod
    def power(cls, q: float) -> "DeformedLog":
        return cls("power", q=q)

    @classmethod
    def kaniadakis(cls) -> "DeformedLog":
        return cls("kaniadakis")

    @classmethod
    def newton(cls) -> "DeformedLog":
        return cls("newton")

    @classmethod
    def custom(cls, slope: Callable[[float], float]) -> "DeformedLog":
        return cls("custom", slope=slope)

    # -- slope ------------------------------------------------------------

    def slope(self, u: float) -> float:
        """The generating function A at u > 0."""
        if u <= 0.0:
            raise RangeError("A is defined on (0, oo)")
        if self.kind == "power":
            return u**self.q
        if self.kind == "kaniadakis":
            return 2.0 * u**2 / (1.0 + u**2)
        if self.kind == "newton":
            return u / (1.0 + u)
        return self._slope(u)

    # -- logarithm ----------------------------------------------------------

    def log(self, x: float) -> float:
        if not (x > 0.0) or not math.isfinite(x):
            raise RangeError(f"log_A needs x > 0, got {x!r}")
        if self.kind == "power":
            if self.q == 1.0:
                return math.log(x)
            om = 1.0 - self.q
            return (x**om - 1.0) / om
        if self.kind == "kaniadakis":
            return math.sinh(math.log(x))
        if self.kind == "newton":
            return math.log(x) + x - 1.0
        return _adaptive_simpson(lambda u: 1.0 / self._slope(u), 1.0, x)

    # -- exponential ----------------------------------------------------------

    def exp(self, y: float) -> float:
        if not math.isfinite(y):
            raise RangeError("exp_A needs a finite argument")
        if self.kind == "power":
            if self.q == 1.0:
                return math.exp(y)
            om = 1.0 - self.q
            base = 1.0 + om * y
            if base <= 0.0:
                raise RangeError(f"{y!r} is outside the range of ln_q for q={self.q}")
            return base ** (1.0 / om)
        if self.kind == "kaniadakis":
            return math.exp(math.asinh(y))
        if self.kind == "newton":
            return _invert_increasing(
                lambda x: math.log(x) + x - 1.0, y, deriv=lambda x: 1.0 / x + 1.0
            )
        # d/dx log_A = 1/A, so the slope is analytic even for custom A.
        return _invert_increasing(self.log, y, deriv=lambda x: 1.0 / self._slope(x))


def log_A(dl: DeformedLog, x: float) -> float:
    """The deformed logarithm log_A(x) = integral_1^x du/A(u)."""
    return dl.log(x)


def exp_A(dl: DeformedLog, y: float) -> float:
    """The inverse of :func:`log_A`."""
    return dl.exp(y)


# ---------------------------------------------------------------------------
# q-deformed bundle


class QFiberVector:
    """An element of the q-deformed fiber: sum values * p^q = 0.

    Values are recentered at construction by subtracting their p^q-weighted
    mean, the deformed analog of ordinary fiber centering.
    """

    __slots__ = ("base", "q", "values")

    def __init__(self, base: ProbabilityVector, q: float, values):
        v = np.array(values, dtype=float)
        if v.shape != (base.size,):
            raise DomainError("value count must match the sample space")
        if not np.all(np.isfinite(v)):
            raise DomainError("values must be finite")
        wq = base.weights**q
        v = v - float(np.dot(wq, v)) / float(wq.sum())
        v.flags.writeable = False
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "q", float(q))
        object.__setattr__(self, "values", v)

    def __setattr__(self, name, value):
        raise AttributeError("QFiberVector is immutable")

    def deformed_mean(self) -> float:
        """The constraint functional sum values * p^q (zero by construction)."""
        return float(np.dot(self.base.weights**self.q, self.values))


def q_score(
    curve: Callable[[float], ProbabilityVector], t: float, q: float, h: float
) -> QFiberVector:
    """Central-difference q-score d/dt ln_q p(t) = p'(t) / p(t)^q.

    q = 1 delegates to the ordinary score so the two discretizations agree
    exactly in that case.
    """
    if h <= 0:
        raise DomainError("step h must be positive")
    if q == 1.0:
        s = score_of_curve(curve, t, h)
        return QFiberVector(s.base, 1.0, s.values)
    p0, p_minus, p_plus = _eval_curve_window(curve, t, h)
    pdot = (p_plus.weights - p_minus.weights) / (2.0 * h)
    return QFiberVector(p0, q, pdot / p0.weights**q)


def tsallis_entropy(p: ProbabilityVector, q: float) -> float:
    """Tsallis entropy (-1 + sum p^q) / (1 - q); Shannon entropy at q = 1."""
    if q == 1.0:
        return entropy(p)
    return float((-1.0 + np.sum(p.weights**q)) / (1.0 - q))
