"""Command-line front end: tableau export, integration runs, convergence and
drift experiments.

CSV (with a '#'-prefixed metadata header) is the output contract; --plot
additionally renders the corresponding matplotlib figure to a file.
Exit codes: 0 success, 1 usage error, 2 solver failure.
"""

import argparse
import json
import os
import subprocess
import sys

import numpy as np

from . import __version__
from .hamiltonians import PROBLEMS, get_problem
from .harness import DEFAULT_T_END, convergence_study, drift_experiment
from .integrator import ConvergenceError, SolverOptions, integrate
from .tableau import hbvm_tableau, tableau_to_csv, tableau_to_json

__all__ = ["cli_main", "main", "UsageError"]

SOLVER_MODES = {"fixed-point": "fixed_point", "newton": "newton_like"}


class UsageError(Exception):
    """Bad command line arguments (unknown names, invalid combinations)."""


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so cli_main can map usage errors to code 1
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _build_label() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"hbvm {__version__} ({out.stdout.strip()})"
    except OSError:
        pass
    return f"hbvm {__version__}"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _metadata_lines(args, horizon=None) -> list[str]:
    lines = [
        f"# command: {args.command}",
        f"# method: HBVM({args.k},{args.s})",
    ]
    if getattr(args, "problem", None):
        lines.append(f"# problem: {args.problem}")
    if getattr(args, "h", None) is not None:
        lines.append(f"# h: {_fmt(args.h)}")
    if getattr(args, "h0", None) is not None:
        lines.append(f"# h0: {_fmt(args.h0)}")
    if horizon is not None:
        lines.append(f"# horizon: {_fmt(horizon)}")
    if hasattr(args, "solver"):
        lines.append(
            f"# solver: {args.solver} tol={args.tol:g} max_iter={args.max_iter}"
        )
    lines.append(f"# build: {_build_label()}")
    return lines


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        mode=SOLVER_MODES[args.solver],
        tolerance=args.tol,
        max_iterations=args.max_iter,
    )


def _resolve_problem(args):
    if args.problem not in PROBLEMS:
        known = ", ".join(sorted(PROBLEMS))
        raise UsageError(f"unknown problem {args.problem!r} (known: {known})")
    return get_problem(args.problem)


def _resolve_tableau(args):
    if args.s < 1 or args.s > args.k:
        raise UsageError(f"need 1 <= s <= k, got k={args.k}, s={args.s}")
    return hbvm_tableau(args.k, args.s)


def _initial_state(args, system):
    if args.y0 is None:
        return system.y0
    try:
        y0 = np.array([float(v) for v in args.y0.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse --y0 {args.y0!r} as comma-separated floats") from None
    if y0.size != 2 * system.m:
        raise UsageError(
            f"--y0 has {y0.size} components, problem {system.name!r} needs {2 * system.m}"
        )
    return y0


def _cmd_tableau(args) -> int:
    tab = _resolve_tableau(args)
    if args.format == "json":
        _emit(tableau_to_json(tab) + "\n", args.out)
    else:
        text = "\n".join(_metadata_lines(args)) + "\n" + tableau_to_csv(tab)
        _emit(text, args.out)
    return 0


def _cmd_integrate(args) -> int:
    tab = _resolve_tableau(args)
    system = _resolve_problem(args)
    y0 = _initial_state(args, system)
    trajectory = integrate(tab, system, y0, args.h, args.steps, _solver_options(args))
    d = trajectory.states.shape[1]
    if args.format == "json":
        doc = {
            "method": f"HBVM({args.k},{args.s})",
            "problem": args.problem,
            "h": args.h,
            "times": trajectory.times.tolist(),
            "states": trajectory.states.tolist(),
            "energy_error": trajectory.energy_error.tolist(),
        }
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        lines = _metadata_lines(args, horizon=args.h * args.steps)
        lines.append("step,time," + ",".join(f"y_{i + 1}" for i in range(d)) + ",energy_error")
        for n in range(len(trajectory.times)):
            fields = [str(n), _fmt(trajectory.times[n])]
            fields += [_fmt(v) for v in trajectory.states[n]]
            fields.append(_fmt(trajectory.energy_error[n]))
            lines.append(",".join(fields))
        _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .figures import save_trajectory_figure

        save_trajectory_figure(
            trajectory, args.plot, title=f"HBVM({args.k},{args.s}) on {args.problem}, h={args.h:g}"
        )
    return 0


def _cmd_converge(args) -> int:
    _resolve_tableau(args)
    system = _resolve_problem(args)
    t_end = args.t_end if args.t_end is not None else DEFAULT_T_END[args.problem]
    report = convergence_study(
        args.k, args.s, system, args.h0, args.levels, t_end, _solver_options(args)
    )
    if args.format == "json":
        doc = {
            "method": f"HBVM({args.k},{args.s})",
            "problem": args.problem,
            "t_end": t_end,
            "stepsizes": report.stepsizes.tolist(),
            "errors": report.errors.tolist(),
            "orders": report.orders.tolist(),
            "horizons": report.horizons.tolist(),
        }
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        lines = _metadata_lines(args)
        lines.append(f"# t_end: {_fmt(t_end)}")
        lines.append("# horizons: " + " ".join(_fmt(v) for v in report.horizons))
        lines.append("h,error,order")
        for i in range(len(report.stepsizes)):
            order = _fmt(report.orders[i - 1]) if i > 0 else ""
            lines.append(f"{_fmt(report.stepsizes[i])},{_fmt(report.errors[i])},{order}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .figures import save_convergence_figure

        save_convergence_figure(
            report, args.plot, title=f"HBVM({args.k},{args.s}) on {args.problem}"
        )
    return 0


def _cmd_drift(args) -> int:
    _resolve_tableau(args)
    system = _resolve_problem(args)
    result = drift_experiment(
        args.k, args.s, system, args.h, args.steps, _solver_options(args)
    )
    if args.format == "json":
        doc = {
            "method": f"HBVM({args.k},{args.s})",
            "problem": args.problem,
            "h": args.h,
            "slope": result.slope,
            "steps": result.steps.tolist(),
            "times": result.times.tolist(),
            "energy_error": result.energy_delta.tolist(),
        }
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        lines = _metadata_lines(args, horizon=args.h * args.steps)
        lines.append(f"# drift_slope: {_fmt(result.slope)}")
        lines.append("step,time,energy_error")
        for n in range(len(result.steps)):
            lines.append(f"{result.steps[n]},{_fmt(result.times[n])},{_fmt(result.energy_delta[n])}")
        _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        from .figures import save_drift_figure

        save_drift_figure(
            result, args.plot, title=f"HBVM({args.k},{args.s}) on {args.problem}, h={args.h:g}"
        )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="hbvm", description=__doc__)

    common = _Parser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for sampled checks (reproducibility)")

    method = _Parser(add_help=False)
    method.add_argument("--k", type=int, required=True, help="number of Lobatto subintervals")
    method.add_argument("--s", type=int, required=True, help="degree of the stage polynomial")

    run = _Parser(add_help=False)
    run.add_argument("--problem", required=True, help="problem name (%s)" % ", ".join(sorted(PROBLEMS)))
    run.add_argument("--solver", choices=tuple(SOLVER_MODES), default="fixed-point")
    run.add_argument("--tol", type=float, default=1e-13)
    run.add_argument("--max-iter", type=int, default=100)
    run.add_argument("--y0", help="override initial state, comma-separated")
    run.add_argument("--plot", metavar="PATH", help="also render a figure to PATH")

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tableau", parents=[common, method], help="export an HBVM(k,s) tableau")
    p.set_defaults(func=_cmd_tableau)

    p = sub.add_parser("integrate", parents=[common, method, run], help="integrate a problem")
    p.add_argument("--h", type=float, required=True, help="stepsize")
    p.add_argument("--steps", type=int, required=True, help="number of steps")
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("converge", parents=[common, method, run], help="stepsize-halving order study")
    p.add_argument("--h0", type=float, required=True, help="coarsest stepsize")
    p.add_argument("--levels", type=int, default=5, help="number of reported stepsizes")
    p.add_argument("--t-end", type=float, default=None,
                   help="integration horizon (default: per-problem)")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("drift", parents=[common, method, run], help="energy-drift experiment")
    p.add_argument("--h", type=float, required=True, help="stepsize")
    p.add_argument("--steps", type=int, required=True, help="number of steps")
    p.set_defaults(func=_cmd_drift)

    return parser


def cli_main(argv=None) -> int:
    """Entry point returning an exit code instead of raising SystemExit."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(f"hbvm: error: {err}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.seed is not None:
        np.random.seed(args.seed)
    try:
        return args.func(args)
    except UsageError as err:
        print(f"hbvm: error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"hbvm: error: {err}", file=sys.stderr)
        return 1
    except ConvergenceError as err:
        print(f"hbvm: solver failure: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
