"""Second-order calculus: accelerations, the mixture Hessian, affine atlases.

Accelerations are measured against the two transports.  For a twice
differentiable curve p(t) with score Sp = d/dt log p:

* exponential acceleration:  p''/p - (Sp)^2 + E_{p(t)}[(Sp)^2],
* mixture acceleration:      p''/p.

Exponential families have null exponential acceleration and mixture lines
(1 + tU) p have null mixture acceleration, which is what the affine charts
below linearize.  All second derivatives are central differences with one
Richardson extrapolation step (h, h/2).

The exponential and mixture atlases chart the simplex on the fiber at a
chosen center; their patches are exact inverses and all transition maps are
affine in the point coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BaseMismatch,
    DomainError,
    GeometryError,
    NormError,
    OutOfInterval,
    SpaceMismatch,
)
from .simplex import (
    EQ_TOL,
    FiberVector,
    ProbabilityVector,
    RandomVariable,
    _eval_curve_window,
    inner_product,
    score_of_curve,
)
from .flows import _logsumexp, exp_family_curve
from . import transports


# ---------------------------------------------------------------------------
# Accelerations


def _weights_window(curve, t, h):
    p0, p_minus, p_plus = _eval_curve_window(curve, t, h)
    return p0, p_minus.weights, p_plus.weights


def _e_acceleration_raw(curve, t, h):
    p0, wm, wp = _weights_window(curve, t, h)
    w0 = p0.weights
    pdot = (wp - wm) / (2.0 * h)
    pddot = (wp - 2.0 * w0 + wm) / h**2
    s = pdot / w0
    s2 = s**2
    return p0, pddot / w0 - s2 + float(np.dot(w0, s2))


def _m_acceleration_raw(curve, t, h):
    p0, wm, wp = _weights_window(curve, t, h)
    pddot = (wp - 2.0 * p0.weights + wm) / h**2
    return p0, pddot / p0.weights


def _richardson(raw, curve, t, h):
    # Central differences carry an O(h^2) leading error; one (h, h/2) step
    # cancels it.
    p0, coarse = raw(curve, t, h)
    _, fine = raw(curve, t, 0.5 * h)
    return FiberVector(p0, (4.0 * fine - coarse) / 3.0)


def e_acceleration(
    curve: Callable[[float], ProbabilityVector], t: float, h: float = 1e-4
) -> FiberVector:
    """Exponential acceleration of a curve at t, centered at p(t)."""
    return _richardson(_e_acceleration_raw, curve, t, h)


def m_acceleration(
    curve: Callable[[float], ProbabilityVector], t: float, h: float = 1e-4
) -> FiberVector:
    """Mixture acceleration p''(t)/p(t), centered at p(t)."""
    return _richardson(_m_acceleration_raw, curve, t, h)


def m_hessian_quadratic_form(
    f: Callable[[ProbabilityVector], float],
    p: ProbabilityVector,
    U: FiberVector,
    h: float = 1e-3,
) -> float:
    """Quadratic form <Hess f(p) U, U>_p of the mixture Hessian.

    Evaluated as the second derivative of t -> f(exp(t U - psi(t)) p) at
    t = 0; along such a probe the exponential acceleration vanishes, so the
    second derivative is exactly the Hessian form.  Central differences with
    one Richardson step.
    """
    if U.base.max_distance(p) > EQ_TOL:
        raise BaseMismatch("direction U must be a fiber at p")
    stat = RandomVariable(p.space, U.values)

    def g(t: float) -> float:
        return f(exp_family_curve(stat, p, t)[0])

    g0 = g(0.0)

    def second_difference(step: float) -> float:
        return (g(step) - 2.0 * g0 + g(-step)) / step**2

    coarse = second_difference(h)
    fine = second_difference(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def taylor_remainder(
    f: Callable[[ProbabilityVector], float],
    grad_f: Callable[[ProbabilityVector], FiberVector],
    p: ProbabilityVector,
    U: FiberVector,
) -> float:
    """Remainder of the second-order expansion along the exponential probe.

    f(q) - f(p) - <grad f(p), U>_p - (1/2) <Hess U, U>_p with
    q = exp(U - K_p(U)) p; the remainder is cubic in U.
    """
    stat = RandomVariable(p.space, U.values)
    q, _ = exp_family_curve(stat, p, 1.0)
    linear = inner_product(grad_f(p), U)
    quad = m_hessian_quadratic_form(f, p, U)
    return f(q) - f(p) - linear - 0.5 * quad


# ---------------------------------------------------------------------------
# Affine atlases


@dataclass(frozen=True)
class ChartImage:
    """Coordinates of a bundle element (q, w) in the chart centered at ``center``."""

    center: ProbabilityVector
    point_coord: FiberVector
    vector_coord: FiberVector

    def __post_init__(self):
        for coord in (self.point_coord, self.vector_coord):
            if coord.base.max_distance(self.center) > EQ_TOL:
                raise BaseMismatch("chart coordinates must be fibers at the center")


def _check_space(a, b, what: str) -> None:
    if a.space != b.space:
        raise SpaceMismatch(f"{what} on different sample spaces")


def e_chart(
    center: ProbabilityVector, q: ProbabilityVector, w: FiberVector
) -> ChartImage:
    """Exponential chart at ``center``: (q, w) -> (centered log(q/p), e-transport of w)."""
    _check_space(center, q, "chart center and point")
    log_ratio = q.log_weights - center.log_weights
    u = FiberVector(center, log_ratio - float(np.dot(center.weights, log_ratio)))
    v = transports.e_transport(w, center)
    return ChartImage(center, u, v)


def e_patch(
    center: ProbabilityVector, u: FiberVector, v: FiberVector
) -> tuple[ProbabilityVector, FiberVector]:
    """Inverse of the exponential chart.

    Returns q = exp(u - K_p(u)) p with K_p(u) = log E_p[exp u], and the
    vector v - E_q[v] re-based at q.
    """
    for coord in (u, v):
        if coord.base.max_distance(center) > EQ_TOL:
            raise BaseMismatch("patch coordinates must be fibers at the center")
    lw = center.log_weights + u.values
    K = _logsumexp(lw)
    q = ProbabilityVector._trusted(center.space, np.exp(lw - K))
    vec = FiberVector(q, v.values - float(np.dot(q.weights, v.values)))
    return q, vec


def e_transition(
    p1: ProbabilityVector, p2: ProbabilityVector, u: FiberVector
) -> FiberVector:
    """Point coordinate of the chart change at p2 -> at p1; affine in u."""
    _check_space(p1, p2, "chart centers")
    if u.base.max_distance(p2) > EQ_TOL:
        raise BaseMismatch("coordinate u must be a fiber at the source center")
    shift = p2.log_weights - p1.log_weights
    vals = (
        u.values
        - float(np.dot(p1.weights, u.values))
        + shift
        - float(np.dot(p1.weights, shift))
    )
    return FiberVector(p1, vals)


def m_chart(
    center: ProbabilityVector, q: ProbabilityVector, w: FiberVector
) -> ChartImage:
    """Mixture chart at ``center``: (q, w) -> (q/p - 1, m-transport of w)."""
    _check_space(center, q, "chart center and point")
    u = FiberVector(center, q.weights / center.weights - 1.0)
    v = transports.m_transport(w, center)
    return ChartImage(center, u, v)


def m_patch(
    center: ProbabilityVector, u: FiberVector, v: FiberVector
) -> tuple[ProbabilityVector, FiberVector]:
    """Inverse of the mixture chart: ((1 + u) p, v / (1 + u) re-based).

    Requires 1 + u > 0 componentwise.  Dividing the vector coordinate by the
    density ratio 1 + u = q/p undoes the mixture transport of the chart, so
    chart and patch are exact mutual inverses.
    """
    for coord in (u, v):
        if coord.base.max_distance(center) > EQ_TOL:
            raise BaseMismatch("patch coordinates must be fibers at the center")
    ratio = 1.0 + u.values
    if np.any(ratio <= 0.0):
        raise OutOfInterval("1 + u must stay positive to patch the mixture chart")
    w = ratio * center.weights
    q = ProbabilityVector._trusted(center.space, w / w.sum())
    vec = FiberVector(q, v.values / ratio)
    return q, vec


def m_transition(
    p1: ProbabilityVector, p2: ProbabilityVector, u: FiberVector
) -> FiberVector:
    """Point coordinate of the mixture chart change: (1 + u)(p2/p1) - 1."""
    _check_space(p1, p2, "chart centers")
    if u.base.max_distance(p2) > EQ_TOL:
        raise BaseMismatch("coordinate u must be a fiber at the source center")
    vals = (1.0 + u.values) * (p2.weights / p1.weights) - 1.0
    return FiberVector(p1, vals)


# ---------------------------------------------------------------------------
# Curve zoo


ZOO_NAMES = ("ex1", "ex2", "ex3", "ex4")


def zoo_curve_weights(name: str, p: ProbabilityVector, U: FiberVector, t: float) -> np.ndarray:
    """Raw (possibly unnormalized) weights of a study curve at time t.

    The four curves, for a fiber U at p:

    * ``ex1``: (1/2 + 1/2 (1 - tU)^2 - t/2 E_p[U^2]) p  -- taken literally;
      its mass drifts away from 1 except at t in {0, 1}, which the report
      surfaces instead of correcting.
    * ``ex2``: (tU + sqrt(1 - t^2 E_p[U^2]))^2 p
    * ``ex3``: (1 + t^2 E_p[U^2])^{-1} (1 + tU)^2 p
    * ``ex4``: (1 + sinh(t) U)^2 / cosh(t)^2 p, for unit-norm U.
    """
    if name not in ZOO_NAMES:
        raise DomainError(f"unknown zoo curve {name!r}; expected one of {ZOO_NAMES}")
    if U.base.max_distance(p) > EQ_TOL:
        raise BaseMismatch("zoo direction U must be a fiber at p")
    u = U.values
    w = p.weights
    m2 = float(np.dot(w, u**2))
    if name == "ex1":
        return (0.5 + 0.5 * (1.0 - t * u) ** 2 - 0.5 * t * m2) * w
    if name == "ex2":
        radicand = 1.0 - t**2 * m2
        if radicand < 0.0:
            raise OutOfInterval(f"1 - t^2 E[U^2] < 0 at t={t}")
        return (t * u + math.sqrt(radicand)) ** 2 * w
    if name == "ex3":
        return (1.0 + t * u) ** 2 * w / (1.0 + t**2 * m2)
    # ex4
    if abs(U.norm() - 1.0) > 1e-10:
        raise NormError("ex4 needs a unit-norm fiber")
    g = 1.0 + math.sinh(t) * u
    return g**2 * w / math.cosh(t) ** 2


def curve_zoo(name: str, p: ProbabilityVector, U: FiberVector, t: float) -> ProbabilityVector:
    """A zoo curve as a simplex point; fails when the value leaves the simplex."""
    raw = zoo_curve_weights(name, p, U, t)
    if np.any(raw <= 0.0):
        raise OutOfInterval(f"curve {name} leaves the open simplex at t={t}")
    try:
        return ProbabilityVector(p.space, raw)
    except DomainError as exc:
        raise OutOfInterval(f"curve {name} is not normalized at t={t}: {exc}") from exc


def zoo_ex4_score(p: ProbabilityVector, U: FiberVector, t: float) -> FiberVector:
    """Analytic score of the ex4 curve: 2(cosh(t) U / (1 + sinh(t) U) - tanh(t))."""
    g = 1.0 + math.sinh(t) * U.values
    vals = 2.0 * (math.cosh(t) * U.values / g - math.tanh(t))
    return FiberVector(curve_zoo("ex4", p, U, t), vals)


def zoo_report(
    name: str,
    p: ProbabilityVector,
    U: FiberVector,
    ts: np.ndarray,
    h: float = 1e-5,
) -> dict:
    """Evaluate a zoo curve on a grid and check its structural claims.

    Membership (positivity and unit mass) is checked at every time.  For
    ``ex4`` the analytic score formula is compared against the numerical
    score; for ``ex3`` the numerical score is compared against the Hilbert
    transport of U, and the verdict reports whether they agree rather than
    asserting either way.
    """
    rows = []
    for t in np.asarray(ts, dtype=float):
        try:
            raw = zoo_curve_weights(name, p, U, float(t))
        except GeometryError as exc:
            rows.append({"t": float(t), "evaluable": False, "reason": str(exc)})
            continue
        mass = float(raw.sum())
        rows.append(
            {
                "t": float(t),
                "evaluable": True,
                "weights": [float(x) for x in raw],
                "mass": mass,
                "min_weight": float(raw.min()),
                "member": bool(raw.min() > 0.0 and abs(mass - 1.0) <= 1e-9),
            }
        )
    member_rows = [r for r in rows if r.get("evaluable")]
    report = {
        "curve": name,
        "rows": rows,
        "all_member": bool(member_rows and all(r["member"] for r in member_rows)),
        "max_mass_deviation": max(
            (abs(r["mass"] - 1.0) for r in member_rows), default=math.nan
        ),
    }

    def interior_times():
        for r in member_rows:
            if r["member"] and abs(r["t"]) > 1e-9:
                yield r["t"]

    if name == "ex4":
        dev = 0.0
        for t in interior_times():
            numeric = score_of_curve(lambda s: curve_zoo("ex4", p, U, s), t, h)
            analytic = zoo_ex4_score(p, U, t)
            dev = max(dev, float(np.max(np.abs(numeric.values - analytic.values))))
        report["score_formula_max_deviation"] = dev
        report["score_formula_matches"] = bool(dev <= 1e-6)
    if name == "ex3":
        dev = 0.0
        for t in interior_times():
            point = curve_zoo("ex3", p, U, t)
            numeric = score_of_curve(lambda s: curve_zoo("ex3", p, U, s), t, h)
            carried = transports.h_transport(U, point)
            dev = max(dev, float(np.max(np.abs(numeric.values - carried.values))))
        report["h_transport_max_deviation"] = dev
        report["matches_h_transport"] = bool(dev <= 1e-6)
    return report
