# CLI wrapper with __main__
# python3 -m src.descriptor_refine.cli.main check-sim abstract.json concrete.json relation.json
"""Command-line entry point for the refinement toolkit."""

import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path

import numpy as np

from config.logging import setup_logging
from config.settings import settings
from src.descriptor_refine.cli.verify_example import ExampleRun, run_checks
from src.descriptor_refine.core.numkit import Tolerance
from src.descriptor_refine.dvtransform.dv import check_dv_consistency, save_dv, to_dv
from src.descriptor_refine.refinement.models import load_refined, save_refined
from src.descriptor_refine.refinement.pipeline import composed_wellposedness, refine_end_to_end
from src.descriptor_refine.relations.models import load_relation
from src.descriptor_refine.relations.simulation import check_bisimulation, check_simulation, step_witness
from src.descriptor_refine.simulate.refined import simulate_refined
from src.descriptor_refine.simulate.stepping import simulate_closed_loop
from src.descriptor_refine.simulate.wellposed import check_wellposed
from src.descriptor_refine.systems.checks import membership_residual, validate
from src.descriptor_refine.systems.io import load_controller, load_points, load_system, parse_vector
from src.descriptor_refine.utils.constants import EXIT_OK, EXIT_USAGE, EXIT_VERDICT
from src.descriptor_refine.utils.exceptions import DescriptorRefineError, ParseError

logger = logging.getLogger(__name__)

REFINED_MARKER = "Kz"


def _emit(report: dict):
    print(json.dumps(report, indent=2, sort_keys=True))


def _verdict_exit(passed: bool) -> int:  # noqa: FBT001
    return EXIT_OK if passed else EXIT_VERDICT


def cmd_validate(args: argparse.Namespace, tol: Tolerance) -> int:
    """Standing rank assumptions of a system file."""
    report = validate(load_system(args.system), tol)
    _emit(report.to_dict())
    return _verdict_exit(report.passed)


def cmd_to_dv(args: argparse.Namespace, tol: Tolerance) -> int:
    """Driving-variable form of a system file."""
    sys_ = load_system(args.system)
    dv = to_dv(sys_, tol)
    save_dv(dv, args.out)
    _emit({"n": dv.n, "p": dv.p, "ps": dv.ps, "consistent": check_dv_consistency(sys_, dv, tol), "out": str(args.out)})
    return EXIT_OK


def cmd_check_sim(args: argparse.Namespace, tol: Tolerance) -> int:
    """Simulation test of a graph relation, with a witness on step failure."""
    abs_sys, conc, rel = load_system(args.abstract), load_system(args.concrete), load_relation(args.relation)
    report = check_simulation(abs_sys, conc, rel, tol)
    payload = report.to_dict()
    if not report.step_match:
        witness = step_witness(abs_sys, conc, rel, tol)
        payload["witness"] = witness.to_dict() if witness else None
    _emit(payload)
    return _verdict_exit(report.verdict)


def cmd_check_bisim(args: argparse.Namespace, tol: Tolerance) -> int:
    """Simulation test in both directions."""
    report = check_bisimulation(load_system(args.abstract), load_system(args.concrete), load_relation(args.relation), tol)
    _emit(report.to_dict())
    return _verdict_exit(report.verdict)


def cmd_check_wellposed(args: argparse.Namespace, tol: Tolerance) -> int:
    """Rank test of a plant-controller pair."""
    report = check_wellposed(load_system(args.system), load_controller(args.controller), tol)
    _emit(report.to_dict())
    return _verdict_exit(report.verdict)


def cmd_refine(args: argparse.Namespace, tol: Tolerance) -> int:
    """Refine an abstract controller and write the refined controller file."""
    conc = load_system(args.concrete)
    rc = refine_end_to_end(
        conc,
        load_system(args.abstract),
        load_relation(args.relation),
        load_controller(args.controller),
        tol,
        seed=args.seed,
    )
    save_refined(rc, args.out)
    _emit(
        {
            "out": str(args.out),
            "z_dim": rc.z_dim,
            "P": rc.P.tolist(),
            "wellposedness": composed_wellposedness(conc, rc, tol).to_dict(),
        },
    )
    return EXIT_OK


def _is_refined_file(path: str | Path) -> bool:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(str(path), "file", str(exc)) from exc
    return isinstance(raw, dict) and REFINED_MARKER in raw


def _csv_path(base: str | None, index: int, total: int) -> Path | None:
    if not base:
        return None
    path = Path(base)
    if total == 1:
        return path
    return path.with_name(f"{path.stem}_{index}{path.suffix}")


def cmd_simulate(args: argparse.Namespace, tol: Tolerance) -> int:
    """Closed-loop run under a controller or refined controller file."""
    sys_ = load_system(args.system)
    if args.points:
        starts = load_points(args.points, sys_.n)
    elif args.x0:
        starts = parse_vector(args.x0, sys_.n)[np.newaxis, :]
    else:
        starts = np.zeros((1, sys_.n))

    if _is_refined_file(args.controller):
        rc = load_refined(args.controller)

        def run(x0: np.ndarray):
            return simulate_refined(sys_, rc, x0, args.steps, tol)[0]
    else:
        ctrl = load_controller(args.controller)

        def run(x0: np.ndarray):
            return simulate_closed_loop(sys_, ctrl, x0, args.steps, tol)

    runs = []
    for index, x0 in enumerate(starts):
        traj = run(x0)
        csv_path = _csv_path(args.csv, index, len(starts))
        if csv_path:
            traj.to_csv(csv_path)
        runs.append(
            {
                "x0": x0.tolist(),
                "horizon": traj.horizon,
                "y_final": traj.y[-1].tolist(),
                "membership_residual": membership_residual(sys_, traj),
                "csv": str(csv_path) if csv_path else None,
            },
        )
    _emit({"runs": runs})
    return EXIT_OK


def cmd_verify_example(args: argparse.Namespace, tol: Tolerance) -> int:
    """All acceptance checks on the built-in worked example."""
    results = run_checks(ExampleRun(tol=tol, seed=args.seed, steps=args.steps, bound=args.bound))
    passed = all(result.passed for result in results)
    _emit({"checks": [result.to_dict() for result in results], "passed": passed})
    return _verdict_exit(passed)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, help="Relative singular-value cutoff")
    common.add_argument("--tol-residual", type=float, help="Absolute residual bound")
    common.add_argument("--seed", type=int, default=settings.SEED, help="Seed for randomized checks")
    common.add_argument("--steps", type=int, default=100, help="Simulation horizon")
    common.add_argument("--bound", type=float, default=settings.COMPARE_BOUND, help="Output comparison bound")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-command per pipeline operation."""
    parser = argparse.ArgumentParser(description="Exact control refinement for linear descriptor systems")
    commands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    def add(name: str, handler: Callable[[argparse.Namespace, Tolerance], int], help_text: str):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = add("validate", cmd_validate, "Check the rank assumptions of a system")
    sub.add_argument("system")

    sub = add("to-dv", cmd_to_dv, "Write the driving-variable form of a system")
    sub.add_argument("system")
    sub.add_argument("--out", required=True, help="DV system file to write")

    for name, handler, help_text in (
        ("check-sim", cmd_check_sim, "Check a simulation relation x_a = H x"),
        ("check-bisim", cmd_check_bisim, "Check a bisimulation relation x_a = H x"),
    ):
        sub = add(name, handler, help_text)
        sub.add_argument("abstract")
        sub.add_argument("concrete")
        sub.add_argument("relation")

    sub = add("check-wellposed", cmd_check_wellposed, "Rank test of a plant-controller pair")
    sub.add_argument("system")
    sub.add_argument("controller")

    sub = add("refine", cmd_refine, "Refine an abstract controller for the concrete system")
    sub.add_argument("concrete")
    sub.add_argument("abstract")
    sub.add_argument("relation")
    sub.add_argument("controller")
    sub.add_argument("--out", required=True, help="Refined controller file to write")

    sub = add("simulate", cmd_simulate, "Simulate a plant under a controller or refined controller")
    sub.add_argument("system")
    sub.add_argument("controller")
    starts = sub.add_mutually_exclusive_group()
    starts.add_argument("--x0", help="Initial state as comma-separated decimals")
    starts.add_argument("--points", help="Points file with one initial state per entry")
    sub.add_argument("--csv", help="Write the trajectory (or one file per point) as CSV")

    add("verify-example", cmd_verify_example, "Run the built-in worked example end to end")
    return parser


def main(args: list[str] | None = None) -> int:
    """Parse arguments, run one command and map failures to exit codes."""
    parsed_args = build_parser().parse_args(args)
    setup_logging("DEBUG" if parsed_args.verbose else None)
    try:
        tol = Tolerance.from_settings(parsed_args.tol_rank, parsed_args.tol_residual)
        return parsed_args.handler(parsed_args, tol)
    except DescriptorRefineError as exc:
        logger.error("%s failed: %s", parsed_args.command, exc)  # noqa: TRY400
        return exc.exit_code
    except ValueError as exc:
        logger.error("%s: invalid input: %s", parsed_args.command, exc)  # noqa: TRY400
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
