"""Simulation and bisimulation tests for graph relations x_a = H x.

Step matching is decided on the driving-variable forms: the successors of x
are exactly A_d x + im B_d, so the abstract system is simulated iff

    im(A_da H - H A_d) and im(B_da) are contained in im(H B_d).

The test quantifies over every x in R^n, not only reachable states.
"""

import logging

import numpy as np

from src.descriptor_refine.core.numkit import (
    DEFAULT_TOLERANCE,
    Tolerance,
    image_contained,
    inf_norm,
    min_norm_solve,
)
from src.descriptor_refine.dvtransform.dv import DrivingVariableSystem, to_dv
from src.descriptor_refine.relations.cover import check_init_simulated, check_initial_cover
from src.descriptor_refine.relations.interface import relation_drift
from src.descriptor_refine.relations.models import BisimulationReport, LinearStateMap, SimulationReport, StepWitness
from src.descriptor_refine.systems.models import DescriptorSystem
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, UnsupportedCombinationError

logger = logging.getLogger(__name__)


def _check_pair(abs_sys: DescriptorSystem, conc: DescriptorSystem, rel: LinearStateMap):
    if abs_sys.k != conc.k:
        msg = f"output dimensions differ: abstract {abs_sys.k}, concrete {conc.k}"
        raise DimensionMismatchError(msg)
    rel.check_dims(abs_sys.n, conc.n)


def output_residual(abs_sys: DescriptorSystem, conc: DescriptorSystem, rel: LinearStateMap) -> float:
    """|C_a H - C|."""
    return inf_norm(abs_sys.C @ rel.H - conc.C)


def _step_clauses(
    abs_sys: DescriptorSystem,
    conc: DescriptorSystem,
    rel: LinearStateMap,
    tol: Tolerance,
) -> tuple[bool, bool, np.ndarray, list[str]]:
    """Output and step matching of the abstract system by the concrete one."""
    abs_dv, conc_dv = to_dv(abs_sys, tol), to_dv(conc, tol)
    messages = []

    out_residual = output_residual(abs_sys, conc, rel)
    output_match = out_residual <= tol.residual_atol
    if not output_match:
        messages.append(f"C_a H differs from C by {out_residual:.3e}")

    drift = relation_drift(abs_dv, conc_dv, rel)
    hbd = rel.H @ conc_dv.Bd
    drift_ok = image_contained(drift, hbd, tol)
    drive_ok = image_contained(abs_dv.Bd, hbd, tol)
    if not drift_ok:
        messages.append("im(A_da H - H A_d) is not contained in im(H B_d)")
    if not drive_ok:
        messages.append("im(B_da) is not contained in im(H B_d)")
    return output_match, drift_ok and drive_ok, drift, messages


def _initial_clause(check, abs_init, conc_init, rel: LinearStateMap, tol: Tolerance, failure: str):
    """Run an initial-set check; unsupported set pairs count as failures."""
    try:
        holds = check(abs_init, conc_init, rel, tol)
    except UnsupportedCombinationError as exc:
        return False, [str(exc)]
    return holds, [] if holds else [failure]


def check_simulation(
    abs_sys: DescriptorSystem,
    conc: DescriptorSystem,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> SimulationReport:
    """Whether x_a = H x is a simulation relation from ``abs_sys`` to ``conc``."""
    _check_pair(abs_sys, conc, rel)
    output_match, step_match, drift, messages = _step_clauses(abs_sys, conc, rel, tol)
    initial_cover, initial_messages = _initial_clause(
        check_initial_cover, abs_sys.init, conc.init, rel, tol, "H X0 is not contained in the abstract initial set"
    )
    messages.extend(initial_messages)

    report = SimulationReport(output_match, step_match, drift, initial_cover, messages)
    if report.verdict:
        logger.debug("relation accepted")
    else:
        logger.info("relation rejected: %s", "; ".join(messages))
    return report


def _unmatched(
    abs_dv: DrivingVariableSystem,
    conc_dv: DrivingVariableSystem,
    rel: LinearStateMap,
    x: np.ndarray,
    s_a: np.ndarray,
    tol: Tolerance,
) -> StepWitness:
    successor = abs_dv.Ad @ (rel.H @ x) + abs_dv.Bd @ s_a
    target = successor - rel.H @ (conc_dv.Ad @ x)
    hbd = rel.H @ conc_dv.Bd
    s, _ = min_norm_solve(hbd, target, tol)
    return StepWitness(x=x, s_a=s_a, abstract_successor=successor, residual=inf_norm(hbd @ s - target))


def step_witness(
    abs_sys: DescriptorSystem,
    conc: DescriptorSystem,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> StepWitness | None:
    """Concrete state and abstract drive whose abstract successor has no match.

    Returns None when step matching holds. Otherwise the witness is a basis
    vector of (x, s_a) whose offset column escapes im(H B_d).
    """
    _check_pair(abs_sys, conc, rel)
    abs_dv, conc_dv = to_dv(abs_sys, tol), to_dv(conc, tol)
    hbd = rel.H @ conc_dv.Bd
    drift = relation_drift(abs_dv, conc_dv, rel)

    candidates = []
    for j in range(conc.n):
        if not image_contained(drift[:, [j]], hbd, tol):
            candidates.append((np.eye(conc.n)[j], np.zeros(abs_dv.ps)))
    for j in range(abs_dv.ps):
        if not image_contained(abs_dv.Bd[:, [j]], hbd, tol):
            candidates.append((np.zeros(conc.n), np.eye(abs_dv.ps)[j]))
    if not candidates:
        return None
    witnesses = [_unmatched(abs_dv, conc_dv, rel, x, s_a, tol) for x, s_a in candidates]
    witness = max(witnesses, key=lambda item: item.residual)
    logger.debug("step witness: residual %.3e", witness.residual)
    return witness


def check_bisimulation(
    abs_sys: DescriptorSystem,
    conc: DescriptorSystem,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> BisimulationReport:
    """Simulation in both directions through the same graph relation.

    Each direction carries its own initial clause. The forward direction
    (concrete mimics abstract) needs every abstract initial state to have a
    preimage in X0. The backward direction (abstract mimics concrete) asks
    im(H A_d - A_da H) and im(H B_d) in im(B_da), with H X0 inside the
    abstract initial set.
    """
    _check_pair(abs_sys, conc, rel)
    output_match, step_match, drift, forward_messages = _step_clauses(abs_sys, conc, rel, tol)
    preimage_ok, initial_messages = _initial_clause(
        check_init_simulated, abs_sys.init, conc.init, rel, tol, "some abstract initial state has no preimage in X0"
    )
    forward = SimulationReport(output_match, step_match, drift, preimage_ok, forward_messages + initial_messages)

    abs_dv, conc_dv = to_dv(abs_sys, tol), to_dv(conc, tol)
    back_drift = -drift
    messages = [] if output_match else list(forward_messages[:1])
    drift_ok = image_contained(back_drift, abs_dv.Bd, tol)
    drive_ok = image_contained(rel.H @ conc_dv.Bd, abs_dv.Bd, tol)
    if not drift_ok:
        messages.append("im(H A_d - A_da H) is not contained in im(B_da)")
    if not drive_ok:
        messages.append("im(H B_d) is not contained in im(B_da)")
    cover_ok, cover_messages = _initial_clause(
        check_initial_cover, abs_sys.init, conc.init, rel, tol, "H X0 is not contained in the abstract initial set"
    )
    backward = SimulationReport(output_match, drift_ok and drive_ok, back_drift, cover_ok, messages + cover_messages)
    report = BisimulationReport(forward, backward)
    logger.debug("bisimulation verdict: %s", report.verdict)
    return report
