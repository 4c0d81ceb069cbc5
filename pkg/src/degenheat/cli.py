"""Command-line front end: analyze / control / simulate / spline-test.

Configuration comes from an optional JSON file (--config) overridden by
flags; every run is deterministic and outputs are written atomically
(temp file + rename).  JSON reports carry schema_version and snake_case
keys.  Exit codes: 0 ok, 2 invalid parameters, 3 bad-set membership when
synthesis was requested, 4 Gram conditioning failure, 5 solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import collocation as co
from . import controllability as ct
from . import moment_control as mc
from . import splines as sp
from .spectrum import (
    ProblemParams,
    build_basis,
    expand_initial_data,
    mu_critical,
    nu_param,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID_PARAMS = 2
EXIT_BAD_SET = 3
EXIT_CONDITIONING = 4
EXIT_SOLVER = 5


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, payload: dict) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_u0(expr: str):
    """Initial-state expression in x with a restricted numpy namespace."""
    ns = {
        "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
        "sqrt": np.sqrt, "abs": np.abs, "pi": math.pi, "log": np.log,
    }
    code = compile(expr, "<u0>", "eval")
    for name in code.co_names:
        if name not in ns and name != "x":
            raise ValueError(f"unknown name {name!r} in initial-state expression")

    def u0(x):
        return np.asarray(eval(code, {"__builtins__": {}}, {**ns, "x": np.asarray(x, float)}), dtype=float)

    return u0


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merged(args: argparse.Namespace, config: dict, key: str, default):
    """Flag value if given, else config value, else default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags win")
    p.add_argument("--alpha", type=float, help="degeneracy exponent in [0, 1)")
    p.add_argument("--mu", type=float, help="singular potential strength, mu <= (1-alpha)^2/4")
    p.add_argument("--b", type=float, dest="b", help="control point in (0, 1)")
    p.add_argument("--T", type=float, dest="T", help="time horizon")
    p.add_argument("--K", type=int, dest="K", help="spectral truncation order")
    p.add_argument("--degree", type=int, choices=(2, 3), help="spline degree")
    p.add_argument("--knots", help="knot set: x1, x2, or x3")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--scheme", choices=co.SCHEMES, help="time integrator")
    p.add_argument("--u0", help="initial state expression in x")
    p.add_argument("--out", help="output directory", default=None)


def _problem(args, config) -> ProblemParams:
    return ProblemParams(
        alpha=float(_merged(args, config, "alpha", 0.5)),
        mu=float(_merged(args, config, "mu", 1.0 / 16.0)),
        b_bar=float(_merged(args, config, "b", 0.5)),
        T=float(_merged(args, config, "T", 1.0)),
    )


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    params = _problem(args, config)
    K = int(_merged(args, config, "K", 50))
    scan_depth = int(_merged(args, config, "scan_depth", max(K, 200)))
    tol = float(_merged(args, config, "tol", 1e-9))
    margin = float(_merged(args, config, "margin", 0.05))
    out = _merged(args, config, "out", "degenheat_out")

    verdict = ct.bad_set_membership(params, scan_depth, tol)
    basis = build_basis(params, K)
    report = {
        "alpha": params.alpha,
        "mu": params.mu,
        "b_bar": params.b_bar,
        "t_horizon": params.T,
        "nu": nu_param(params.alpha, params.mu),
        "mu_critical": mu_critical(params.alpha),
        "lambdas": basis.lambdas.tolist(),
        "bad_set_verdict": {
            "in_p": verdict.in_p,
            "witness": list(verdict.witness) if verdict.witness else None,
            "scan_depth": verdict.scan_depth,
            "tolerance": verdict.tolerance,
        },
    }
    if verdict.in_p:
        report["minimal_time"] = None
        report["verdict"] = "not_approximately_controllable"
        _write_json(os.path.join(out, "analyze.json"), report)
        if args.synthesize:
            print("control synthesis refused: b_bar is in the bad set", file=sys.stderr)
            return EXIT_BAD_SET
        return EXIT_OK
    est = ct.minimal_time_estimate(basis, params.b_bar, K)
    table = os.path.join(out, "minimal_time_per_k.csv")
    lines = ["k,lambda,abs_phi,ratio,running_sup"]
    for row, run in zip(est.per_k, est.running_sup):
        lines.append(f"{int(row[0])},{row[1]!r},{row[2]!r},{row[3]!r},{run!r}")
    _atomic_write(table, "\n".join(lines) + "\n")
    report["minimal_time"] = {
        "estimate": est.estimate,
        "window": [math.ceil(est.K / 2), est.K],
        "per_k_table": table,
    }
    report["verdict"] = ct.null_controllability_verdict(params.T, est, margin).value
    _write_json(os.path.join(out, "analyze.json"), report)
    return EXIT_OK


def cmd_control(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    params = _problem(args, config)
    K = int(_merged(args, config, "K", 8))
    scan_depth = int(_merged(args, config, "scan_depth", 200))
    tol = float(_merged(args, config, "tol", 1e-9))
    samples = int(_merged(args, config, "samples", mc.DEFAULT_SAMPLES))
    out = _merged(args, config, "out", "degenheat_out")
    u0 = _parse_u0(_merged(args, config, "u0", "3*sin(2*pi*x)"))

    verdict = ct.bad_set_membership(params, scan_depth, tol)
    if verdict.in_p:
        print(
            json.dumps({"error": "bad_set_membership", "witness": list(verdict.witness)}),
            file=sys.stderr,
        )
        return EXIT_BAD_SET
    basis = build_basis(params, max(K, 8))
    coeffs = expand_initial_data(basis, u0)
    try:
        family = mc.biorthogonal_family(basis.lambdas[:K], params.T)
    except mc.ConditioningError as exc:
        print(
            json.dumps({"error": "conditioning_failure",
                        "gram_condition": exc.condition_number,
                        "defect": exc.defect}),
            file=sys.stderr,
        )
        return EXIT_CONDITIONING
    signal = mc.synthesize_control(basis, family, coeffs, params.b_bar, samples)
    res_max = float(np.abs(signal.residuals).max())
    lines = [f"# K={K},T={params.T!r},max_abs_residual={res_max!r}", "t,h"]
    for t, v in zip(signal.time_grid, signal.values):
        lines.append(f"{t!r},{v!r}")
    _atomic_write(os.path.join(out, "h.csv"), "\n".join(lines) + "\n")
    _write_json(os.path.join(out, "residuals.json"), {
        "k_modes": K,
        "t_horizon": params.T,
        "residuals": signal.residuals.tolist(),
        "max_abs_residual": res_max,
        "control_l2_norm": signal.l2_norm,
        "gram_condition": family.gram_condition,
        "solver_tag": family.solver_tag,
        "biorthogonality_defect": family.defect,
    })
    return EXIT_OK


def _load_control_csv(path: str):
    ts, hs = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("t,"):
                continue
            t, v = line.split(",")
            ts.append(float(t))
            hs.append(float(v))
    grid, vals = np.array(ts), np.array(hs)

    def h(t):
        return np.interp(np.asarray(t, float), grid, vals)

    return h


def _trajectory_csv(path: str, traj: co.Trajectory, params: ProblemParams,
                    kname: str, dt: float, scheme: str, instants) -> None:
    xs = np.linspace(0.0, 1.0, 201)
    lines = [
        f"# alpha={params.alpha!r},mu={params.mu!r},b_bar={params.b_bar!r},"
        f"degree={traj.space.degree},knot_set={kname},dt={dt!r},scheme={scheme}",
        "t,x,u",
    ]
    for t_req in instants:
        step = int(np.argmin(np.abs(traj.times - t_req)))
        vals = traj.values(xs, step=step)
        for x, u in zip(xs, vals):
            lines.append(f"{traj.times[step]!r},{x!r},{u!r}")
    _atomic_write(path, "\n".join(lines) + "\n")


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    params = _problem(args, config)
    degree = int(_merged(args, config, "degree", 2))
    kname = _merged(args, config, "knots", "x1")
    dt = float(_merged(args, config, "dt", 0.02))
    scheme = _merged(args, config, "scheme", "implicit_euler")
    out = _merged(args, config, "out", "degenheat_out")
    u0 = _parse_u0(_merged(args, config, "u0", "3*sin(2*pi*x)"))
    space = sp.knot_set(kname, degree)
    qi = None
    if kname == "x1":
        qi = sp.build_quasi_interpolant(degree, space.n_intervals)
    try:
        system = co.assemble(params, space, qi)
        traj_u = co.simulate(system, u0, None, scheme, dt)
    except co.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    instants = _merged(args, config, "times", None)
    if instants is None:
        instants = [0.0, params.T / 4, params.T / 2, 3 * params.T / 4, params.T]
    _trajectory_csv(os.path.join(out, "uncontrolled.csv"), traj_u, params, kname, dt, scheme, instants)
    l2_u, sup_u = co.final_norms(traj_u)
    summary = {"uncontrolled": {"l2": l2_u, "sup": sup_u}, "controlled": None}
    if args.control is not None:
        h = _load_control_csv(args.control)
        try:
            traj_c = co.simulate(system, u0, h, scheme, dt)
        except co.SolverError as exc:
            print(f"solver failure: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        _trajectory_csv(os.path.join(out, "controlled.csv"), traj_c, params, kname, dt, scheme, instants)
        l2_c, sup_c = co.final_norms(traj_c)
        summary["controlled"] = {"l2": l2_c, "sup": sup_c}
    _write_json(os.path.join(out, "final_norms.json"), summary)
    return EXIT_OK


def cmd_spline_test(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    out = _merged(args, config, "out", "degenheat_out")
    xs = np.linspace(0.0, 1.0, 401)
    for name in sp.PAPER_KNOT_NAMES:
        for degree in (2, 3):
            space = sp.knot_set(name, degree)
            design = sp.collocation_matrix(space, xs)
            header = "x," + ",".join(f"B_{k+1}" for k in range(space.dim))
            lines = [header]
            for x, row in zip(xs, design):
                lines.append(f"{x!r}," + ",".join(repr(v) for v in row))
            _atomic_write(os.path.join(out, f"basis_{name}_d{degree}.csv"),
                          "\n".join(lines) + "\n")
    n_list = (8, 16, 32, 64, 128)
    f = lambda x: np.sin(3 * np.pi * x)
    rep2 = sp.convergence_order(2, f, n_list)
    rep3 = sp.convergence_order(3, f, n_list)
    _write_json(os.path.join(out, "convergence.json"), {
        "quadratic_slope": rep2.slope,
        "cubic_slope": rep3.slope,
        "taus": rep2.taus.tolist(),
        "quadratic_sup_errors": rep2.sup_errors.tolist(),
        "cubic_sup_errors": rep3.sup_errors.tolist(),
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degenheat",
        description="Pointwise controllability toolkit for 1-D degenerate/singular heat equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="spectrum, bad-set verdict, minimal-time estimate")
    _common_flags(p)
    p.add_argument("--scan-depth", type=int, dest="scan_depth", help="bad-set scan depth")
    p.add_argument("--tol", type=float, help="bad-set tolerance")
    p.add_argument("--margin", type=float, help="verdict margin")
    p.add_argument("--synthesize", action="store_true",
                   help="fail with exit 3 if b_bar is in the bad set")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("control", help="synthesize the moment-method control")
    _common_flags(p)
    p.add_argument("--scan-depth", type=int, dest="scan_depth")
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int, help="number of time samples of h")
    p.set_defaults(func=cmd_control)

    p = sub.add_parser("simulate", help="collocation simulation, optionally controlled")
    _common_flags(p)
    p.add_argument("--control", help="h.csv produced by the control command")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spline-test", help="basis tabulations and convergence orders")
    _common_flags(p)
    p.set_defaults(func=cmd_spline_test)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    except ct.PointInBadSetError as exc:
        print(f"bad-set membership: {exc}", file=sys.stderr)
        return EXIT_BAD_SET
    except mc.ConditioningError as exc:
        print(
            json.dumps({"error": "conditioning_failure",
                        "gram_condition": exc.condition_number, "defect": exc.defect}),
            file=sys.stderr,
        )
        return EXIT_CONDITIONING
    except co.SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
