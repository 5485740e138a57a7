"""Natural-gradient sections and flows on the open simplex.

A section assigns to every point p a fiber vector F(p); its flow solves the
score equation  d/dt log p(t) = F(p(t)), equivalently the replicator-form
system  dp(x)/dt = p(x) F(x, p).  :func:`integrate_flow` is a fixed-step
classical Runge-Kutta integrator written in log coordinates, which keeps the
state strictly positive and renormalizes after every step.

Closed-form solutions are provided for the flows that admit one and serve as
oracles for the integrator:

* expected-value gradient -> exponential family  exp(t f - psi(t)) p0,
* entropy gradient        -> tempered family     p0 ** exp(-t),
* reverse-KL descent      -> linear relaxation   p* + (p0 - p*) exp(-t),
* mixture-transport section -> (1 + t U) p0 on its admissible interval,
* Hilbert-transport section -> (cos(t/2) + sin(t/2) U)^2 p0 for unit U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    NormError,
    NumericalBlowup,
    OutOfInterval,
    SpaceMismatch,
)
from .simplex import (
    FiberVector,
    ProbabilityVector,
    RandomVariable,
    SampleSpace,
    center,
    entropy,
    kl,
)
from . import transports


def _logsumexp(v: np.ndarray) -> float:
    m = float(v.max())
    return m + math.log(float(np.exp(v - m).sum()))


# ---------------------------------------------------------------------------
# Sections and point gradients


@dataclass(frozen=True)
class Section:
    """An assignment p -> F(p) in the fiber at p (an estimating function).

    ``raw``, when present, evaluates the same section directly on the weight
    and log-weight arrays and returns centered values; the integrator uses it
    to skip object construction in its inner loop.  Sections must be pure.
    """

    evaluator: Callable[[ProbabilityVector], FiberVector]
    name: str = "section"
    raw: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def __call__(self, p: ProbabilityVector) -> FiberVector:
        return self.evaluator(p)


def natural_gradient(
    ambient_gradient: Callable[[ProbabilityVector], RandomVariable],
    p: ProbabilityVector,
) -> FiberVector:
    """Natural gradient from an ambient one: grad f(p) = nabla f(p) - E_p[nabla f(p)]."""
    return center(ambient_gradient(p), p)


def grad_entropy(p: ProbabilityVector) -> FiberVector:
    """Natural gradient of the entropy: -log p - H(p)."""
    return FiberVector(p, -p.log_weights - entropy(p))


def grad_kl_first(p: ProbabilityVector, p0: ProbabilityVector) -> FiberVector:
    """Natural gradient of p -> KL(p || p0): log(p/p0) - KL(p || p0)."""
    if p.space != p0.space:
        raise SpaceMismatch("divergence gradient needs both points on one space")
    return FiberVector(p, (p.log_weights - p0.log_weights) - kl(p, p0))


def grad_kl_second(p: ProbabilityVector, p0: ProbabilityVector) -> FiberVector:
    """Natural gradient of p -> KL(p0 || p): 1 - p0/p."""
    if p.space != p0.space:
        raise SpaceMismatch("divergence gradient needs both points on one space")
    return FiberVector(p, 1.0 - p0.weights / p.weights)


def expected_value_section(f: RandomVariable) -> Section:
    """Gradient section of p -> E_p[f], namely p -> f - E_p[f]."""
    vals = f.values

    def raw(w, lw):
        return vals - np.dot(w, vals)

    return Section(lambda p: center(f, p), name="expected_value", raw=raw)


def entropy_section() -> Section:
    def raw(w, lw):
        return -lw + np.dot(w, lw)

    return Section(grad_entropy, name="entropy", raw=raw)


def kl_forward_section(p0: ProbabilityVector) -> Section:
    """Gradient section of p -> KL(p || p0)."""
    ref = p0.log_weights

    def raw(w, lw):
        ratio = lw - ref
        return ratio - np.dot(w, ratio)

    return Section(lambda p: grad_kl_first(p, p0), name="kl_forward", raw=raw)


def kl_reverse_section(p0: ProbabilityVector) -> Section:
    """Gradient section of p -> KL(p0 || p)."""
    ref = p0.weights

    def raw(w, lw):
        return 1.0 - ref / w

    return Section(lambda p: grad_kl_second(p, p0), name="kl_reverse", raw=raw)


def e_transport_section(U: FiberVector) -> Section:
    """Section carrying U to every point by exponential transport."""
    vals = U.values

    def raw(w, lw):
        return vals - np.dot(w, vals)

    return Section(lambda p: transports.e_transport(U, p), name="e_transport", raw=raw)


def m_transport_section(U: FiberVector) -> Section:
    """Section carrying U to every point by mixture transport."""
    base = U.base.weights
    vals = U.values

    def raw(w, lw):
        return vals * (base / w)

    return Section(lambda p: transports.m_transport(U, p), name="m_transport", raw=raw)


def h_transport_section(U: FiberVector) -> Section:
    """Section carrying U to every point by Hilbert transport."""
    base = U.base.weights
    vals = U.values

    def raw(w, lw):
        r = np.sqrt(base / w)
        ru = r * vals
        return ru - (1.0 + r) * (np.dot(w, ru) / (1.0 + np.dot(w, r)))

    return Section(lambda p: transports.h_transport(U, p), name="h_transport", raw=raw)


# ---------------------------------------------------------------------------
# Trajectories


class Trajectory:
    """Time-ordered samples (t, p(t), Sp(t)) of a flow or closed-form curve.

    Points and scores are stored as dense matrices; the typed views
    :meth:`point` and :meth:`score` build bundle objects on demand.
    """

    def __init__(
        self,
        space: SampleSpace,
        times: np.ndarray,
        weights: np.ndarray,
        score_values: np.ndarray,
    ):
        times = np.asarray(times, dtype=float)
        if times.ndim != 1 or np.any(np.diff(times) <= 0.0):
            raise DomainError("trajectory times must be strictly increasing")
        if weights.shape != (times.size, space.size) or score_values.shape != weights.shape:
            raise DomainError("trajectory arrays have inconsistent shapes")
        self.space = space
        self.times = times
        self.weights = weights
        self.score_values = score_values
        for arr in (self.times, self.weights, self.score_values):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return self.times.size

    def point(self, i: int) -> ProbabilityVector:
        return ProbabilityVector._trusted(self.space, self.weights[i])

    def score(self, i: int) -> FiberVector:
        return FiberVector._trusted(self.point(i), self.score_values[i])

    @property
    def points(self) -> list[ProbabilityVector]:
        return [self.point(i) for i in range(len(self))]

    @property
    def scores(self) -> list[FiberVector]:
        return [self.score(i) for i in range(len(self))]

    @property
    def final_point(self) -> ProbabilityVector:
        return self.point(len(self) - 1)

    def score_norms(self) -> np.ndarray:
        """Fiber norms ||Sp(t)||_{p(t)} along the trajectory."""
        return np.sqrt(np.einsum("ij,ij->i", self.weights, self.score_values**2))

    def to_csv(self, stream) -> None:
        """Write rows ``t,p_0..p_{N-1},s_0..s_{N-1}`` in full double precision."""
        n = self.space.size
        header = (
            ["t"]
            + [f"p_{i}" for i in range(n)]
            + [f"s_{i}" for i in range(n)]
        )
        stream.write(",".join(header) + "\n")
        for k in range(len(self)):
            row = [self.times[k], *self.weights[k], *self.score_values[k]]
            stream.write(",".join(f"{x:.17g}" for x in row) + "\n")


# ---------------------------------------------------------------------------
# The integrator


def integrate_flow(
    F: Section | Callable[[ProbabilityVector], FiberVector],
    p0: ProbabilityVector,
    t_end: float,
    dt: float = 1e-3,
    sign: int = 1,
) -> Trajectory:
    """Integrate the score equation Sp(t) = sign * F(p(t)) from p0 to t_end.

    Classical fourth-order Runge-Kutta with fixed step ``dt`` on the log
    weights v = log p; after every step v is renormalized by its logsumexp so
    the state never leaves the open simplex.  A final shortened step lands
    exactly on ``t_end``.  The recorded score at each sample is the actual
    Sp(t) including the sign.

    Raises :class:`NumericalBlowup` (reporting the time) if the state stops
    being finite.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise DomainError("dt and t_end must be positive")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")

    space = p0.space
    sgn = float(sign)

    raw = F.raw if isinstance(F, Section) else None
    if raw is not None:

        def rhs(v: np.ndarray) -> np.ndarray:
            lw = v - _logsumexp(v)
            return sgn * raw(np.exp(lw), lw)

    else:
        evaluator = F.evaluator if isinstance(F, Section) else F

        def rhs(v: np.ndarray) -> np.ndarray:
            w = np.exp(v - _logsumexp(v))
            p = ProbabilityVector._trusted(space, w)
            return sgn * evaluator(p).values

    n_full = int(math.floor(t_end / dt + 1e-12))
    steps = [dt] * n_full
    remainder = t_end - n_full * dt
    if remainder > 1e-12 * max(1.0, t_end):
        steps.append(remainder)

    times = np.empty(len(steps) + 1)
    weights = np.empty((len(steps) + 1, space.size))
    score_values = np.empty_like(weights)

    v = np.array(p0.log_weights)
    t = 0.0
    times[0] = 0.0
    weights[0] = np.exp(v)
    k1 = rhs(v)
    score_values[0] = k1

    for i, h in enumerate(steps, start=1):
        k2 = rhs(v + (0.5 * h) * k1)
        k3 = rhs(v + (0.5 * h) * k2)
        k4 = rhs(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(v)):
            raise NumericalBlowup(f"non-finite state at t={t + h}", t=t + h)
        v -= _logsumexp(v)
        t += h
        times[i] = t
        weights[i] = np.exp(v)
        k1 = rhs(v)  # doubles as the recorded score of this sample
        score_values[i] = k1

    return Trajectory(space, times, weights, score_values)


# ---------------------------------------------------------------------------
# Closed-form curves


@dataclass(frozen=True)
class CumulantRecord:
    """Log-normalizer of an exponential family arc at time t.

    ``psi_dot`` is the mean and ``psi_ddot`` the variance of the sufficient
    statistic under p(t); the variance is nonnegative by construction.
    """

    t: float
    psi: float
    psi_dot: float
    psi_ddot: float

    def __post_init__(self):
        if self.psi_ddot < 0.0:
            raise DomainError("cumulant second derivative must be nonnegative")


def exp_family_curve(
    f: RandomVariable, p0: ProbabilityVector, t: float
) -> tuple[ProbabilityVector, CumulantRecord]:
    """The exponential family exp(t f - psi(t)) p0 with its cumulant data.

    psi(t) = log E_p0[exp(t f)]; psi_dot and psi_ddot are the mean and
    variance of f under the returned point.  Overflow is guarded by
    logsumexp.
    """
    if f.space != p0.space:
        raise SpaceMismatch("statistic and base point on different spaces")
    lw = t * f.values + p0.log_weights
    psi = _logsumexp(lw)
    w = np.exp(lw - psi)
    mean = float(np.dot(w, f.values))
    var = float(np.dot(w, (f.values - mean) ** 2))
    point = ProbabilityVector._trusted(p0.space, w)
    return point, CumulantRecord(t=t, psi=psi, psi_dot=mean, psi_ddot=var)


def entropy_flow_curve(p0: ProbabilityVector, t: float) -> ProbabilityVector:
    """Entropy-gradient flow through p0: normalized p0 ** exp(-t)."""
    a = math.exp(-t)
    lw = a * p0.log_weights
    return ProbabilityVector._trusted(p0.space, np.exp(lw - _logsumexp(lw)))


def kl_relaxation_curve(
    p_init: ProbabilityVector, p_target: ProbabilityVector, t: float
) -> ProbabilityVector:
    """Descent of p -> KL(p_target || p): p_target + (p_init - p_target) exp(-t)."""
    if p_init.space != p_target.space:
        raise SpaceMismatch("relaxation endpoints on different spaces")
    w = p_target.weights + (p_init.weights - p_target.weights) * math.exp(-t)
    return ProbabilityVector(p_init.space, w)


def mixture_interval(U: FiberVector) -> tuple[float, float]:
    """Admissible parameter interval of the mixture curve (1 + t U) p."""
    mx = float(np.max(U.values))
    mn = float(np.min(U.values))
    lo = -1.0 / mx if mx > 0.0 else -math.inf
    hi = -1.0 / mn if mn < 0.0 else math.inf
    return lo, hi


def mixture_flow_curve(U: FiberVector, t: float) -> ProbabilityVector:
    """Mixture-transport flow through the base of U: (1 + t U) p.

    The curve is defined for t in the open interval where 1 + t U stays
    positive; outside it :class:`OutOfInterval` is raised with the interval.
    """
    lo, hi = mixture_interval(U)
    if not (lo < t < hi):
        raise OutOfInterval(
            f"t={t} outside the admissible interval ({lo}, {hi})", interval=(lo, hi)
        )
    w = (1.0 + t * U.values) * U.base.weights
    return ProbabilityVector._trusted(U.base.space, w / w.sum())


def h_flow_curve(U: FiberVector, t: float) -> ProbabilityVector:
    """Hilbert-transport flow through the base of U for unit-norm U.

    p(t) = (cos(t/2) + sin(t/2) U)^2 p; the square has unit mean under p
    exactly, so normalization is analytic.  Requires ||U||_p = 1 and
    positivity of cos(t/2) + sin(t/2) U.
    """
    nrm = U.norm()
    if abs(nrm - 1.0) > 1e-10:
        raise NormError(f"h-flow needs a unit-norm fiber, got ||U|| = {nrm!r}")
    g = math.cos(0.5 * t) + math.sin(0.5 * t) * U.values
    if np.any(g <= 0.0):
        raise OutOfInterval(f"cos(t/2) + sin(t/2) U not positive at t={t}")
    w = g**2 * U.base.weights
    return ProbabilityVector._trusted(U.base.space, w / w.sum())


# ---------------------------------------------------------------------------
# Flow monitoring


@dataclass(frozen=True)
class FlowReport:
    """Descent diagnostics of a scalar function along a trajectory."""

    f_values: np.ndarray
    max_increase: float
    monotone: bool
    grad_norm_sq_integral: float
    terminal_grad_norm: float
    terminal_point: ProbabilityVector
    dominant_index: int

    def to_dict(self) -> dict:
        return {
            "f_initial": float(self.f_values[0]),
            "f_terminal": float(self.f_values[-1]),
            "max_increase": self.max_increase,
            "monotone": self.monotone,
            "grad_norm_sq_integral": self.grad_norm_sq_integral,
            "terminal_grad_norm": self.terminal_grad_norm,
            "terminal_point": [float(w) for w in self.terminal_point.weights],
            "dominant_index": self.dominant_index,
        }


def monitor_gradient_flow(
    traj: Trajectory, f: Callable[[ProbabilityVector], float], slack: float = 1e-10
) -> FlowReport:
    """Check that f decreases along a descent trajectory and summarize it.

    Reports the sampled values of f (nonincreasing up to ``slack`` for a
    descent flow), a trapezoid estimate of the integral of ||Sp||^2, and the
    terminal score norm.  Ties in the dominant terminal weight resolve to the
    lowest index.
    """
    values = np.array([f(traj.point(i)) for i in range(len(traj))])
    increments = np.diff(values)
    max_increase = float(increments.max()) if increments.size else 0.0
    norms_sq = traj.score_norms() ** 2
    integral = float(np.trapezoid(norms_sq, traj.times))
    return FlowReport(
        f_values=values,
        max_increase=max_increase,
        monotone=bool(max_increase <= slack),
        grad_norm_sq_integral=integral,
        terminal_grad_norm=float(math.sqrt(norms_sq[-1])),
        terminal_point=traj.final_point,
        dominant_index=int(np.argmax(traj.weights[-1])),
    )


# ---------------------------------------------------------------------------
# Flow configuration (JSON front end)

FLOW_KINDS = ("entropy", "expected", "kl_m", "custom")


@dataclass(frozen=True)
class FlowSpec:
    """A fully resolved flow problem ready for :func:`integrate_flow`."""

    section: Section
    p0: ProbabilityVector
    dt: float
    t_end: float
    sign: int
    kind: str
    objective: Callable[[ProbabilityVector], float] | None = None

    def run(self) -> Trajectory:
        return integrate_flow(self.section, self.p0, self.t_end, self.dt, self.sign)


def flow_from_config(config: dict) -> FlowSpec:
    """Build a flow from a config mapping.

    Schema: ``{"flow": "entropy"|"expected"|"kl_m"|"custom", "p0": [...],
    "f": [...], "dt": ..., "t_end": ..., "sign": +-1}``.

    * ``expected``: gradient flow of E_p[f];
    * ``entropy``: gradient flow of the entropy;
    * ``kl_m``: gradient flow of p -> KL(f || p), with ``f`` the (normalized)
      target distribution;
    * ``custom``: flow of the mixture-transport section of f centered at p0.

    The ``objective`` field carries the scalar the flow ascends/descends when
    one exists (entropy, expected value, reverse KL); the custom mixture
    section has none.
    """
    if not isinstance(config, dict):
        raise DomainError("flow config must be a JSON object")
    kind = config.get("flow")
    if kind not in FLOW_KINDS:
        raise DomainError(f"unknown flow kind {kind!r}; expected one of {FLOW_KINDS}")
    if "p0" not in config:
        raise DomainError("flow config needs a starting point p0")
    p0_raw = np.asarray(config["p0"], dtype=float)
    space = SampleSpace(p0_raw.size)
    p0 = ProbabilityVector.normalized(space, p0_raw)

    dt = float(config.get("dt", 1e-3))
    t_end = float(config.get("t_end", 10.0))
    sign = int(config.get("sign", 1))
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")

    def need_f() -> np.ndarray:
        if "f" not in config:
            raise DomainError(f"flow kind {kind!r} needs an array f")
        values = np.asarray(config["f"], dtype=float)
        if values.shape != (space.size,):
            raise DomainError("f must have the same length as p0")
        return values

    if kind == "entropy":
        section = entropy_section()
        objective = entropy
    elif kind == "expected":
        f = RandomVariable(space, need_f())
        section = expected_value_section(f)
        objective = lambda p: p.expectation(f)
    elif kind == "kl_m":
        target = ProbabilityVector.normalized(space, need_f())
        section = kl_reverse_section(target)
        objective = lambda p: kl(target, p)
    else:  # custom: density-ratio section of f centered at p0
        U = center(RandomVariable(space, need_f()), p0)
        section = m_transport_section(U)
        objective = None

    return FlowSpec(
        section=section,
        p0=p0,
        dt=dt,
        t_end=t_end,
        sign=sign,
        kind=kind,
        objective=objective,
    )
