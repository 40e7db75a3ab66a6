"""End-to-end checks on the built-in worked example."""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from src.descriptor_refine.core.numkit import Tolerance, inf_norm
from src.descriptor_refine.dvtransform.dv import (
    check_dv_consistency,
    dv_from_matrices,
    to_dv,
    verify_ds_dv_equivalence,
)
from src.descriptor_refine.refinement.pipeline import closed_loop_reduce, refine_end_to_end
from src.descriptor_refine.relations.interface import interface_residual, synthesize_interface
from src.descriptor_refine.relations.models import LinearStateMap
from src.descriptor_refine.relations.simulation import check_simulation
from src.descriptor_refine.simulate.compare import compare_refined_run
from src.descriptor_refine.simulate.refined import simulate_refined
from src.descriptor_refine.simulate.stepping import simulate_closed_loop
from src.descriptor_refine.simulate.wellposed import check_wellposed
from src.descriptor_refine.systems import catalog
from src.descriptor_refine.systems.checks import validate
from src.descriptor_refine.systems.models import Controller

logger = logging.getLogger(__name__)

PERTURBATION = -0.1
CHAR_POLY = np.array([1.0, 0.5, 0.5])
CHAR_POLY_ATOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check."""

    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ExampleRun:
    """Knobs of a worked-example run."""

    tol: Tolerance
    seed: int = 0
    steps: int = 100
    samples: int = 100
    bound: float = 1e-8


def perturbed_relation() -> LinearStateMap:
    """Relation matrix with entry (2, 2) shifted by -0.1."""
    h = catalog.relation_matrix()
    h[1, 1] += PERTURBATION
    return LinearStateMap(h)


def _check_validation(run: ExampleRun) -> CheckResult:
    reports = [validate(catalog.concrete_system(), run.tol), validate(catalog.abstract_system(), run.tol)]
    return CheckResult("validate", all(r.passed for r in reports), "; ".join(m for r in reports for m in r.messages))


def _check_driving_variables(run: ExampleRun) -> CheckResult:
    conc = catalog.concrete_system()
    ours = to_dv(conc, run.tol)
    negated = dv_from_matrices(catalog.negated_concrete_dv(), conc.init)
    consistent = check_dv_consistency(conc, ours, run.tol) and check_dv_consistency(conc, negated, run.tol)
    equivalent = verify_ds_dv_equivalence(conc, ours, 20, run.samples, run.seed, run.tol)
    return CheckResult("driving-variable form", consistent and equivalent, f"consistent={consistent} equivalent={equivalent}")


def _check_relation(run: ExampleRun) -> CheckResult:
    conc, abs_sys = catalog.concrete_system(), catalog.abstract_system()
    accepted = check_simulation(abs_sys, conc, LinearStateMap(catalog.relation_matrix()), run.tol)
    rejected = check_simulation(abs_sys, conc, perturbed_relation(), run.tol)
    passed = accepted.verdict and not rejected.verdict
    return CheckResult("simulation relation", passed, f"H accepted={accepted.verdict}, perturbed H accepted={rejected.verdict}")


def _check_wellposedness(run: ExampleRun) -> CheckResult:
    abs_sys, conc = catalog.abstract_system(), catalog.concrete_system()
    abstract = check_wellposed(abs_sys, catalog.abstract_controller(), run.tol)
    empty = check_wellposed(conc, Controller.empty(conc.n, conc.p), run.tol)
    ranks_ok = abstract.rank_lhs == abstract.rank_aug == abs_sys.n + abs_sys.p
    passed = ranks_ok and abstract.verdict and not empty.uniqueness_ok
    detail = f"abstract ranks {abstract.rank_lhs}/{abstract.rank_aug}, empty controller unique={empty.uniqueness_ok}"
    return CheckResult("well-posedness", passed, detail)


def _check_spectrum(run: ExampleRun) -> CheckResult:
    cl = closed_loop_reduce(catalog.abstract_system(), catalog.abstract_controller(), run.tol)
    coefficients = cl.characteristic_polynomial()
    radius = float(np.max(np.abs(np.linalg.eigvals(cl.K))))
    passed = bool(np.allclose(coefficients, CHAR_POLY, rtol=0.0, atol=CHAR_POLY_ATOL)) and radius < 1.0
    return CheckResult("closed-loop spectrum", passed, f"coefficients {coefficients.tolist()}, spectral radius {radius:.5f}")


def _check_interface(run: ExampleRun) -> CheckResult:
    abs_dv = to_dv(catalog.abstract_system(), run.tol)
    conc_dv = to_dv(catalog.concrete_system(), run.tol)
    rel = LinearStateMap(catalog.relation_matrix())
    iface = synthesize_interface(abs_dv, conc_dv, rel, run.tol)
    row = catalog.negated_interface_row()
    gain = iface.G @ iface.drift
    shape_ok = min(inf_norm(gain - row), inf_norm(gain + row)) <= run.tol.residual_atol
    pass_through_ok = inf_norm(iface.G @ iface.Bda - np.eye(abs_dv.ps)) <= run.tol.residual_atol
    rng = np.random.default_rng(run.seed)
    residual = interface_residual(
        abs_dv,
        conc_dv,
        rel,
        iface,
        rng.uniform(-1.0, 1.0, size=(run.samples, conc_dv.n)),
        rng.uniform(-1.0, 1.0, size=(run.samples, abs_dv.ps)),
    )
    passed = shape_ok and pass_through_ok and residual <= run.bound
    return CheckResult("interface", passed, f"s = s_a + {gain.tolist()} x, residual {residual:.3e}")


def _check_refinement(run: ExampleRun) -> CheckResult:
    conc, abs_sys = catalog.concrete_system(), catalog.abstract_system()
    ctrl_a = catalog.abstract_controller()
    rc = refine_end_to_end(conc, abs_sys, LinearStateMap(catalog.relation_matrix()), ctrl_a, run.tol, seed=run.seed)
    rng = np.random.default_rng(run.seed)
    worst_output = worst_relation = 0.0
    for x0 in conc.init.sample(rng, run.samples):
        traj, z_path = simulate_refined(conc, rc, x0, run.steps, run.tol)
        abstract = simulate_closed_loop(abs_sys, ctrl_a, rc.initial_state(x0), run.steps, run.tol)
        report = compare_refined_run(traj, z_path, rc.rel, abstract, run.bound)
        worst_output = max(worst_output, report.max_output_dev)
        worst_relation = max(worst_relation, report.max_relation_dev)
    passed = worst_output <= run.bound and worst_relation <= run.bound
    detail = f"{run.samples} runs of {run.steps} steps: output dev {worst_output:.3e}, relation dev {worst_relation:.3e}"
    return CheckResult("refinement", passed, detail)


CHECKS: tuple[Callable[[ExampleRun], CheckResult], ...] = (
    _check_validation,
    _check_driving_variables,
    _check_relation,
    _check_wellposedness,
    _check_spectrum,
    _check_interface,
    _check_refinement,
)


def run_checks(run: ExampleRun) -> list[CheckResult]:
    """Run every worked-example check in order."""
    results = []
    for check in CHECKS:
        result = check(run)
        logger.info("%s: %s (%s)", result.name, "pass" if result.passed else "FAIL", result.detail)
        results.append(result)
    return results
