"""Command-line surface: solve, equivalence, optimize, sweep, simulate.

Exit statuses: 0 success, 1 validation or parse error, 2 saturation or
infeasibility, 3 optimizer non-convergence (or a broken equivalence
identity, which the closed forms rule out).
"""

import argparse
import sys

from .errors import (
    ConvergenceError,
    InfeasibleError,
    ModelError,
    SaturationError,
    SimulationError,
)
from .modelfile import build_network, parse_model
from .network import solve
from .report import (
    render_comparison,
    render_equivalence,
    render_optimum,
    render_solution,
    render_sweep_csv,
    sweep_rows,
)
from .routing import HeterogeneousArray, feasibility, optimize_m
from .sim import SimConfig, compare_analytic


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text}")
    return value


def _service_list(text):
    try:
        values = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"not a comma-separated number list: {text!r}"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("needs at least one service time")
    if any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError(f"service times must be > 0: {text}")
    return values


def _cmd_solve(args):
    model = parse_model(args.model)
    if model.kind == "optimize":
        raise ModelError(
            "model has no topology section; use the optimize command"
        )
    solution = solve(build_network(model))
    print(render_solution(solution), end="")
    return 0


def _cmd_equivalence(args):
    text, identical = render_equivalence(args.rate, args.service, args.m)
    print(text, end="")
    return 0 if identical else 3


def _cmd_optimize(args):
    array = HeterogeneousArray(args.services, args.rate)
    feasible, capacity = feasibility(array)
    if not feasible:
        raise InfeasibleError(args.rate, capacity)
    optimum = optimize_m(array)
    print(render_optimum(args.services, optimum), end="")
    return 0


def _cmd_sweep(args):
    if args.steps < 2:
        raise ModelError("sweep needs --steps >= 2")
    rows = sweep_rows(args.rate, args.fast, args.slow, args.steps)
    print(render_sweep_csv(rows), end="")
    return 0


def _cmd_simulate(args):
    model = parse_model(args.model)
    if model.seed is None:
        raise ModelError("model file needs a [simulate] section")
    if model.kind == "optimize":
        raise ModelError(
            "model has no topology section; nothing to simulate"
        )
    config = SimConfig(
        seed=model.seed if args.seed is None else args.seed,
        topology=build_network(model),
        measured_completions=(model.completions if args.completions is None
                              else args.completions),
    )
    comparison = compare_analytic(config)
    print(render_comparison(comparison), end="")
    return 0


def _build_parser():
    parser = _Parser(
        prog="parq",
        description=(
            "Analytic solver, routing optimizer, and simulation oracle "
            "for open networks of M/M/1 queues."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a model file into a report")
    p.add_argument("model", help="path to a model file")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser(
        "equivalence",
        help="compare parallel, tandem, and feedback residence",
    )
    p.add_argument("--rate", type=_positive_float, required=True,
                   help="aggregate arrival rate")
    p.add_argument("--service", type=_positive_float, required=True,
                   help="total service time S")
    p.add_argument("--m", type=_positive_int, required=True,
                   help="queue or stage count")
    p.set_defaults(func=_cmd_equivalence)

    p = sub.add_parser(
        "optimize", help="optimal routing fractions for parallel queues"
    )
    p.add_argument("--rate", type=_positive_float, required=True,
                   help="aggregate arrival rate")
    p.add_argument("--services", type=_service_list, required=True,
                   help="comma-separated per-queue service times")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser(
        "sweep", help="CSV response-time profile over routing fractions"
    )
    p.add_argument("--rate", type=_positive_float, required=True,
                   help="aggregate arrival rate")
    p.add_argument("--fast", type=_positive_float, required=True,
                   help="fast queue service time")
    p.add_argument("--slow", type=_positive_float, required=True,
                   help="slow queue service time")
    p.add_argument("--steps", type=_positive_int, required=True,
                   help="grid points (>= 2)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser(
        "simulate", help="simulate a model file and check the analytic value"
    )
    p.add_argument("model", help="path to a model file with [simulate]")
    p.add_argument("--seed", type=_seed, default=None,
                   help="override the model file seed")
    p.add_argument("--completions", type=_positive_int, default=None,
                   help="override measured completions")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SaturationError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
