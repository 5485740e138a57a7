"""Command-line front end.

Subcommands:

* ``flow``     -- integrate a configured natural-gradient flow, write the
                  trajectory CSV, and report terminal diagnostics.
* ``check``    -- run a module invariant suite with a fixed seed and emit a
                  machine-readable JSON report; exit 0 iff everything passed.
* ``fisher``   -- Fisher information, closed-form inverse and determinant at
                  a solid-simplex point, as JSON.
* ``zoo``      -- evaluate a study curve on a grid; CSV plus a verdict file.
* ``deformed`` -- tabulate a deformed logarithm pair to CSV.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.  All
randomness sits behind one seeded generator whose seed is printed in the
output header, and CSV output uses '.' decimals regardless of locale, so
identical seed and config produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import checks
from .deformed import DeformedLog, tsallis_entropy
from .errors import DomainError, GeometryError, NumericalBlowup
from .flows import flow_from_config, monitor_gradient_flow
from .parametric import SolidCoordinates, fisher_inverse, fisher_inverse_det, fisher_matrix
from .second_order import ZOO_NAMES, zoo_curve_weights, zoo_report
from .sampling import random_unit_fiber
from .simplex import (
    FiberVector,
    ProbabilityVector,
    RandomVariable,
    SampleSpace,
    center,
    probability_to_json,
)

DEFAULT_SEED = checks.DEFAULT_SEED


def _parse_reals(text: str, what: str) -> np.ndarray:
    try:
        values = np.array([float(part) for part in text.split(",") if part.strip() != ""])
    except ValueError as exc:
        raise DomainError(f"could not parse {what} from {text!r}: {exc}") from exc
    if values.size == 0:
        raise DomainError(f"{what} is empty")
    return values


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# flow


def cmd_flow(args) -> int:
    try:
        with open(args.config) as handle:
            config = json.load(handle)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON config: {exc}", file=sys.stderr)
        return 2
    if isinstance(config, dict):
        if args.dt is not None:
            config["dt"] = args.dt
        if args.t_end is not None:
            config["t_end"] = args.t_end
    spec = flow_from_config(config)
    traj = spec.run()

    out = args.out or "trajectory.csv"
    with open(out, "w") as handle:
        traj.to_csv(handle)

    print(f"simplexgeom flow {spec.kind} (seed {args.seed})")
    print(f"steps: {len(traj) - 1}, dt: {spec.dt:g}, t_end: {spec.t_end:g}, sign: {spec.sign:+d}")
    print(f"terminal point: {probability_to_json(traj.final_point)}")
    print(f"terminal gradient norm: {traj.score_norms()[-1]:.17g}")
    if spec.objective is not None:
        descending = spec.sign == -1
        mon_f = spec.objective if descending else (lambda p: -spec.objective(p))
        report = monitor_gradient_flow(traj, mon_f)
        direction = "descending" if descending else "ascending"
        print(
            f"objective monotone ({direction}): {report.monotone} "
            f"(max defect {report.max_increase:.3e})"
        )
    else:
        print("objective monotone: n/a (custom section has no scalar objective)")
    print(f"wrote {out} ({len(traj)} rows)")
    return 0


# ---------------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    seed = args.seed
    if args.suite == "all":
        reports = checks.run_all(seed)
        payload = {
            "seed": seed,
            "passed": all(r.passed for r in reports),
            "suites": [r.to_dict() for r in reports],
        }
        passed = payload["passed"]
    else:
        try:
            report = checks.run_suite(args.suite, seed)
        except KeyError:
            print(
                f"error: unknown suite {args.suite!r}; expected one of "
                f"{checks.SUITE_NAMES + ('all',)}",
                file=sys.stderr,
            )
            return 2
        payload = report.to_dict()
        passed = report.passed
    print(f"simplexgeom check {args.suite} (seed {seed}): {'PASS' if passed else 'FAIL'}")
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# fisher


def cmd_fisher(args) -> int:
    eta = SolidCoordinates(_parse_reals(args.eta, "eta"))
    payload = {
        "eta": [float(x) for x in eta.eta],
        "I": [[float(x) for x in row] for row in fisher_matrix(eta).entries],
        "I_inverse": [[float(x) for x in row] for row in fisher_inverse(eta).entries],
        "det_inverse": fisher_inverse_det(eta),
    }
    _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    return 0


# ---------------------------------------------------------------------------
# zoo


def cmd_zoo(args) -> int:
    if args.name not in ZOO_NAMES:
        print(f"error: unknown curve {args.name!r}; expected one of {ZOO_NAMES}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    if args.p is not None:
        weights = _parse_reals(args.p, "--p")
        space = SampleSpace(weights.size)
        p = ProbabilityVector.normalized(space, weights)
    else:
        space = SampleSpace(2)
        p = ProbabilityVector(space, [0.5, 0.5])
    if args.u is not None:
        U = center(RandomVariable(space, _parse_reals(args.u, "--u")), p)
    elif args.p is None:
        U = FiberVector(p, [1.0, -1.0])
    else:
        U = random_unit_fiber(rng, p)
    if args.name in ("ex4",) and abs(U.norm() - 1.0) > 1e-10:
        U = U * (1.0 / U.norm())

    ts = np.linspace(0.0, args.t, args.steps)
    report = zoo_report(args.name, p, U, ts)

    out = args.out or f"zoo_{args.name}.csv"
    lines = ["t," + ",".join(f"w_{i}" for i in range(space.size)) + ",mass"]
    for t in ts:
        try:
            raw = zoo_curve_weights(args.name, p, U, float(t))
        except GeometryError:
            continue
        lines.append(",".join(f"{x:.17g}" for x in [t, *raw, raw.sum()]))
    with open(out, "w") as handle:
        handle.write("\n".join(lines) + "\n")

    verdict_path = (out[:-4] if out.endswith(".csv") else out) + "_verdict.txt"
    verdict = [
        f"simplexgeom zoo {args.name} (seed {args.seed})",
        f"p = {probability_to_json(p)}",
        f"U = {[float(x) for x in U.values]}",
        f"grid: t in [0, {args.t:g}] with {args.steps} samples",
        f"all samples in the open simplex: {report['all_member']}",
        f"max mass deviation: {report['max_mass_deviation']:.6e}",
    ]
    if "score_formula_max_deviation" in report:
        verdict.append(
            "score formula vs numerical score: "
            f"max deviation {report['score_formula_max_deviation']:.6e} "
            f"({'agree' if report['score_formula_matches'] else 'disagree'})"
        )
    if "h_transport_max_deviation" in report:
        verdict.append(
            "numerical score vs Hilbert transport: "
            f"max deviation {report['h_transport_max_deviation']:.6e} "
            f"({'agree' if report['matches_h_transport'] else 'disagree'}; observational)"
        )
    with open(verdict_path, "w") as handle:
        handle.write("\n".join(verdict) + "\n")

    print(f"simplexgeom zoo {args.name} (seed {args.seed})")
    print(f"membership: {report['all_member']}, max mass deviation {report['max_mass_deviation']:.3e}")
    print(f"wrote {out} and {verdict_path}")
    return 0


# ---------------------------------------------------------------------------
# deformed


def cmd_deformed(args) -> int:
    if args.kind == "power":
        dl = DeformedLog.power(args.q)
        label = f"power q={args.q:g}"
    elif args.kind == "kaniadakis":
        dl = DeformedLog.kaniadakis()
        label = "kaniadakis"
    elif args.kind == "newton":
        dl = DeformedLog.newton()
        label = "newton"
    else:
        print(f"error: unknown kind {args.kind!r}", file=sys.stderr)
        return 2
    if args.x_min <= 0.0 or args.x_max <= args.x_min:
        raise DomainError("need 0 < x-min < x-max")

    xs = np.linspace(args.x_min, args.x_max, args.steps)
    lines = ["x,log,exp_of_log"]
    for x in xs:
        y = dl.log(float(x))
        lines.append(f"{x:.17g},{y:.17g},{dl.exp(y):.17g}")
    out = args.out or "deformed.csv"
    with open(out, "w") as handle:
        handle.write("\n".join(lines) + "\n")

    print(f"simplexgeom deformed {label} (seed {args.seed})")
    if args.p is not None:
        weights = _parse_reals(args.p, "--p")
        p = ProbabilityVector.normalized(SampleSpace(weights.size), weights)
        if args.kind == "power":
            print(f"generalized entropy H_q(p) = {tsallis_entropy(p, args.q):.17g}")
        else:
            print("generalized entropy is only tabulated for the power family")
    print(f"wrote {out} ({args.steps} rows)")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexgeom",
        description="Geometry of the open probability simplex: flows, transports, Fisher objects.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_flow = sub.add_parser("flow", help="integrate a configured flow and export the trajectory")
    p_flow.add_argument("--config", required=True, help="path to a flow config JSON file")
    p_flow.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_flow.add_argument("--dt", type=float, default=None, help="override the config step size")
    p_flow.add_argument("--t-end", dest="t_end", type=float, default=None, help="override the horizon")
    p_flow.add_argument("--out", default=None, help="trajectory CSV path (default trajectory.csv)")
    p_flow.set_defaults(func=cmd_flow)

    p_check = sub.add_parser("check", help="run an invariant suite and emit a JSON report")
    p_check.add_argument("suite", help="one of %s or all" % (checks.SUITE_NAMES,))
    p_check.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_check.add_argument("--out", default=None, help="report path (default stdout)")
    p_check.set_defaults(func=cmd_check)

    p_fisher = sub.add_parser("fisher", help="Fisher information at a solid-simplex point")
    p_fisher.add_argument("eta", help="comma-separated coordinates, e.g. 0.2,0.3,0.4")
    p_fisher.add_argument("--out", default=None, help="JSON path (default stdout)")
    p_fisher.set_defaults(func=cmd_fisher)

    p_zoo = sub.add_parser("zoo", help="evaluate a study curve; CSV plus verdict file")
    p_zoo.add_argument("name", help="one of %s" % (ZOO_NAMES,))
    p_zoo.add_argument("--t", type=float, default=0.5, help="grid endpoint (default 0.5)")
    p_zoo.add_argument("--steps", type=int, default=51)
    p_zoo.add_argument("--p", default=None, help="base point weights, comma-separated")
    p_zoo.add_argument("--u", default=None, help="direction values, centered at p")
    p_zoo.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_zoo.add_argument("--out", default=None, help="CSV path (default zoo_<name>.csv)")
    p_zoo.set_defaults(func=cmd_zoo)

    p_def = sub.add_parser("deformed", help="tabulate a deformed logarithm pair")
    p_def.add_argument("--kind", default="power", choices=("power", "kaniadakis", "newton"))
    p_def.add_argument("--q", type=float, default=2.0, help="exponent for the power family")
    p_def.add_argument("--x-min", dest="x_min", type=float, default=0.1)
    p_def.add_argument("--x-max", dest="x_max", type=float, default=3.0)
    p_def.add_argument("--steps", type=int, default=30)
    p_def.add_argument("--p", default=None, help="weights for a generalized-entropy line")
    p_def.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_def.add_argument("--out", default=None, help="CSV path (default deformed.csv)")
    p_def.set_defaults(func=cmd_deformed)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalBlowup as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
