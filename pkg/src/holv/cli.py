"""Command-line surface.

Commands: classify, solve, pcp, equilibria, simulate, scenario, continuation.
Exit codes: 0 success (verdict failures are still success), 2 input error,
3 method inapplicable, 4 numerical failure. HOLV_THREADS caps BLAS threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

if os.environ.get("HOLV_THREADS"):
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, os.environ["HOLV_THREADS"])

import numpy as np

from .classify import classify as _classify_tensor
from . import lv as _lv
from . import pcp as _pcp
from . import polysolve as _poly
from . import sim as _sim
from .tensor import CubicalTensor

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INAPPLICABLE = 3
EXIT_NUMERICAL = 4


class InputError(Exception):
    pass


class InapplicableError(Exception):
    pass


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.asarray([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise InputError(f"cannot parse vector {text!r}: {exc}") from exc


def _emit(obj, out: str | None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_classify(args) -> int:
    obj = _load_json(args.input)
    try:
        tensor = CubicalTensor.from_json_obj(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad tensor literal: {exc}") from exc
    hint = _parse_vector(args.cert) if args.cert else None
    report = _classify_tensor(tensor, s_hint=hint, tol=args.tol, max_iter=args.max_iter)
    _emit(report.to_json_obj(), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    obj = _load_json(args.input)
    try:
        system = _poly.PolySystem.from_json_obj(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad system file: {exc}") from exc
    cert = _parse_vector(args.cert) if args.cert else None
    try:
        if args.method == "m":
            result = _poly.solve_m_tensor(system, tol=args.tol, max_iter=args.max_iter)
        else:
            result = _poly.solve_s_tensor(system, v=cert, tol=args.tol, max_iter=args.max_iter)
    except (_poly.CertificateNotFoundError, _poly.NotApplicableError) as exc:
        raise InapplicableError(str(exc)) from exc
    _emit(result.to_json_obj(), args.out)
    return EXIT_OK


def cmd_pcp(args) -> int:
    obj = _load_json(args.input)
    try:
        problem = _pcp.QcpProblem.from_json_obj(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad problem file: {exc}") from exc
    report: dict = {"dim": problem.dim, "omega": sorted(_pcp.omega(problem.q))}
    if args.bounds:
        try:
            report["bounds"] = _pcp.norm_bounds(problem).to_json_obj()
        except _pcp.HypothesisError as exc:
            raise InapplicableError(str(exc)) from exc
    if args.solve:
        result = _pcp.support_enumeration(problem, tol=args.tol, seed=args.seed)
        report["solutions"] = [s.to_json_obj() for s in result["solutions"]]
        report["undetermined"] = [list(s) for s in result["undetermined"]]
    _emit(report, args.out)
    return EXIT_OK


def _load_model(path: str) -> _lv.LVModel:
    obj = _load_json(path)
    try:
        return _lv.LVModel.from_json_obj(obj)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad model file: {exc}") from exc


def cmd_equilibria(args) -> int:
    model = _load_model(args.input)
    reports = _lv.find_equilibria(model, tol=args.tol)
    _emit([r.to_json_obj() for r in reports], args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _load_model(args.input)
    if not args.x0:
        raise InputError("at least one --x0 is required")
    inits = [_parse_vector(t) for t in args.x0]
    for x0 in inits:
        if x0.shape != (model.dim,):
            raise InputError(f"--x0 has {len(x0)} entries, model has {model.dim}")
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    opts = _sim.SimOptions(rel_tol=args.tol if args.tol != DEFAULT_TOL else 1e-6)
    try:
        batch = _sim.run_batch(model, inits, args.t_end, opts=opts, seed=args.seed)
    except _sim.NonFiniteStateError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL
    for run_id, traj in enumerate(batch["trajectories"]):
        csv_path = out_dir / f"run{run_id:03d}.csv"
        with open(csv_path, "w") as fh:
            traj.write_csv(fh)
        batch["runs"][run_id]["csv"] = csv_path.name
    (out_dir / "manifest.json").write_text(_sim.manifest_json(batch) + "\n")
    sys.stdout.write(f"wrote {len(inits)} run(s) to {out_dir}\n")
    return EXIT_OK


def cmd_scenario(args) -> int:
    if args.seed is None:
        raise InputError("--seed is required for scenario generation")
    dims = tuple(int(v) for v in str(args.dims).split(","))
    try:
        model = _lv.random_scenario(
            args.kind, dims if len(dims) > 1 else dims[0], seed=args.seed
        )
    except _lv.ScenarioError as exc:
        raise InputError(str(exc)) from exc
    _emit(model.to_json_obj(), args.out)
    return EXIT_OK


def cmd_continuation(args) -> int:
    model = _load_model(args.input)
    grid = [float(v) for v in args.sweep.split(",")]
    try:
        result = _lv.continuation(model, grid)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(
        {
            "points": [
                {"epsilon": e, "equilibrium": x.tolist(), "hurwitz": h}
                for (e, x, h) in result.points
            ],
            "truncated": result.truncated,
            "reason": result.reason,
        },
        args.out,
    )
    return EXIT_OK


DEFAULT_TOL = 1e-10


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holv",
        description="Higher-order Lotka-Volterra toolkit: tensor classification, "
        "polynomial solvers, complementarity analysis, equilibria, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="input JSON file")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--max-iter", type=int, default=5000)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")

    p = sub.add_parser("classify", help="tensor class report")
    common(p)
    p.add_argument("--cert", help="comma-separated certificate hint")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="solve a polynomial tensor system")
    common(p)
    p.add_argument("--cert", help="comma-separated certificate vector")
    p.add_argument("--method", choices=["s", "m"], default="s")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pcp", help="complementarity bounds / enumeration")
    common(p)
    p.add_argument("--bounds", action="store_true")
    p.add_argument("--solve", action="store_true")
    p.set_defaults(func=cmd_pcp)

    p = sub.add_parser("equilibria", help="find and classify equilibria")
    common(p)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("simulate", help="integrate trajectories to CSV")
    common(p)
    p.add_argument("--x0", action="append", help="comma-separated initial state")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--sweep", help="unused placeholder for batch sweeps")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scenario", help="generate a random scenario model")
    common(p, needs_input=False)
    p.add_argument("kind", choices=list(_lv.SCENARIOS))
    p.add_argument("dims", help="n or m,n")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("continuation", help="track equilibrium along an epsilon grid")
    common(p)
    p.add_argument("--sweep", required=True, help="comma-separated ascending grid from 0")
    p.set_defaults(func=cmd_continuation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except InapplicableError as exc:
        sys.stderr.write(f"method not applicable: {exc}\n")
        return EXIT_INAPPLICABLE
    except (_poly.ConvergenceError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
