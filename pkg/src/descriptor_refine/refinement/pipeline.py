"""Three-stage exact control refinement.

Given a simulation relation x_a = H x from an abstract plant to a concrete
one and a well-posed abstract controller:

1. the abstract loop is closed into x_a+ = K x_a, u_a = L x_a and re-expressed
   as a driving schedule s_a = P x_a of the abstract DV form;
2. the interface turns s_a into a concrete driving input s;
3. the lifting constraint B_d^T x+ = B_d^T (A_d x + B_d s) together with the
   plant equations pins x+ down uniquely.

The result is certified by a rank test of the composed step equations and by
finite-horizon runs from seeded samples of the concrete initial set.
"""

import logging

import numpy as np

from config.settings import settings
from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance, inf_norm, min_norm_solve
from src.descriptor_refine.dvtransform.dv import DrivingVariableSystem, to_dv
from src.descriptor_refine.refinement.models import ClosedLoopLinear, RefinedController
from src.descriptor_refine.relations.interface import synthesize_interface
from src.descriptor_refine.relations.models import LinearStateMap
from src.descriptor_refine.relations.simulation import check_simulation
from src.descriptor_refine.simulate.compare import compare_refined_run
from src.descriptor_refine.simulate.refined import simulate_refined
from src.descriptor_refine.simulate.stepping import closed_loop_matrices, simulate_closed_loop
from src.descriptor_refine.simulate.wellposed import WellPosednessReport, check_stacked_wellposed, check_wellposed
from src.descriptor_refine.systems.checks import membership_residual
from src.descriptor_refine.systems.models import Controller, DescriptorSystem
from src.descriptor_refine.utils.constants import (
    CONDITION_EXISTENCE,
    STAGE_ABSTRACT,
    STAGE_INTERFACE,
    STAGE_LIFT,
)
from src.descriptor_refine.utils.exceptions import (
    DimensionMismatchError,
    InfeasibleError,
    NotWellPosedError,
    RelationRejectedError,
)

logger = logging.getLogger(__name__)


def _raise_not_wellposed(report: WellPosednessReport, what: str, stage: str):
    condition = report.failing_condition
    if condition == CONDITION_EXISTENCE:
        msg = f"{what}: rank_lhs {report.rank_lhs} != rank_aug {report.rank_aug}, some states have no continuation"
    else:
        msg = f"{what}: rank_lhs {report.rank_lhs} < {report.unknowns} unknowns, continuations are not unique"
    raise NotWellPosedError(msg, condition, stage=stage)


def closed_loop_reduce(
    abs_sys: DescriptorSystem,
    ctrl: Controller,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ClosedLoopLinear:
    """Solve [E -B; E_c -B_c] [K; L] = [A; A_c] for the unique closed loop."""
    report = check_wellposed(abs_sys, ctrl, tol)
    if not report.verdict:
        _raise_not_wellposed(report, "abstract controller", STAGE_ABSTRACT)
    lhs, rhs = closed_loop_matrices(abs_sys, ctrl)
    solution, feasible = min_norm_solve(lhs, rhs, tol)
    if not feasible:
        msg = "stacked abstract closed-loop equations have no exact solution"
        raise InfeasibleError(msg, stage=STAGE_ABSTRACT)
    cl = ClosedLoopLinear(K=solution[: abs_sys.n], L=solution[abs_sys.n :])
    logger.debug("abstract closed loop: K=%s L=%s", cl.K.tolist(), cl.L.tolist())
    return cl


def abstract_s_schedule(
    abs_dv: DrivingVariableSystem,
    cl: ClosedLoopLinear,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """P = N_a^T ([K; L] - [A_da; C_ua]) so that s_a = P x_a reproduces the closed loop."""
    if cl.K.shape != (abs_dv.n, abs_dv.n) or cl.L.shape != (abs_dv.p, abs_dv.n):
        msg = f"closed loop K {cl.K.shape}, L {cl.L.shape} does not fit the abstract DV form"
        raise DimensionMismatchError(msg)
    target = np.vstack([cl.K, cl.L])
    schedule = abs_dv.kernel.T @ (target - abs_dv.transition)
    residual = inf_norm(abs_dv.transition + abs_dv.kernel @ schedule - target)
    if residual > tol.residual_atol * max(1.0, inf_norm(target)):
        msg = f"closed loop is not reachable through the driving input (residual {residual:.3e})"
        raise InfeasibleError(msg, stage=STAGE_ABSTRACT)
    return schedule


def composed_step_matrices(rc: RefinedController, sys: DescriptorSystem) -> tuple[np.ndarray, np.ndarray]:
    """Step equations of plant and refined controller over unknowns (x+, u, z+) and knowns (x, z)."""
    rc.check_plant(sys)
    n, p, nz = sys.n, sys.p, rc.z_dim
    iface = rc.interface
    cu, du = rc.out
    from_x = iface.G @ iface.drift
    from_z = iface.G @ iface.Bda @ rc.P
    lift_ad, lift_bd = rc.lift_dyn
    lhs = np.block(
        [
            [sys.E, -sys.B, np.zeros((n, nz))],
            [rc.lift_left, np.zeros((rc.lift_left.shape[0], p + nz))],
            [np.zeros((p, n)), np.eye(p), np.zeros((p, nz))],
            [np.zeros((nz, n + p)), np.eye(nz)],
        ],
    )
    rhs = np.block(
        [
            [sys.A, np.zeros((n, nz))],
            [lift_ad + lift_bd @ from_x, lift_bd @ from_z],
            [cu + du @ from_x, du @ from_z],
            [np.zeros((nz, n)), rc.Kz],
        ],
    )
    return lhs, rhs


def composed_wellposedness(
    sys: DescriptorSystem,
    rc: RefinedController,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> WellPosednessReport:
    """Rank certificate for plant and refined controller, for every (x, z)."""
    lhs, rhs = composed_step_matrices(rc, sys)
    return check_stacked_wellposed(lhs, rhs, lhs.shape[1], tol)


def collapse_controller(rc: RefinedController) -> Controller:
    """Plain controller over (u, x) obtained by substituting z = H x.

    With F = G (drift + B_da P H) it reads

        [B_d^T; 0] x+ = [B_d^T (A_d + B_d F); C_u + D_u F] x + [0; -I] u.
    """
    iface = rc.interface
    cu, du = rc.out
    n, p, ps = rc.Ad.shape[0], cu.shape[0], rc.Bd.shape[1]
    feedback = iface.G @ (iface.drift + iface.Bda @ rc.P @ rc.rel.H)
    return Controller(
        Ec=np.vstack([rc.Bd.T, np.zeros((p, n))]),
        Ac=np.vstack([rc.Bd.T @ (rc.Ad + rc.Bd @ feedback), cu + du @ feedback]),
        Bc=np.vstack([np.zeros((ps, p)), -np.eye(p)]),
    )


def certify_refinement(  # noqa: PLR0913
    conc: DescriptorSystem,
    abs_sys: DescriptorSystem,
    ctrl_a: Controller,
    rc: RefinedController,
    horizon: int,
    samples: int,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """Run refined and abstract closed loops from seeded x0 and compare them."""
    rng = np.random.default_rng(seed)
    bound = 10 * tol.residual_atol
    for index, x0 in enumerate(conc.init.sample(rng, samples)):
        traj, z_path = simulate_refined(conc, rc, x0, horizon, tol)
        abstract = simulate_closed_loop(abs_sys, ctrl_a, rc.initial_state(traj.x[0]), horizon, tol)
        # deviations are relative to the size of the run
        scale = max(1.0, inf_norm(traj.x), inf_norm(z_path))
        report = compare_refined_run(traj, z_path, rc.rel, abstract, bound * scale)
        residual = membership_residual(conc, traj)
        if not report.passed or residual > bound * scale:
            msg = (
                f"sample {index}: output deviation {report.max_output_dev:.3e}, "
                f"relation deviation {report.max_relation_dev:.3e}, plant residual {residual:.3e}"
            )
            raise InfeasibleError(msg, stage=STAGE_LIFT)
    logger.debug("refinement certified on %d samples over %d steps", samples, horizon)


def refine_end_to_end(  # noqa: PLR0913
    conc: DescriptorSystem,
    abs_sys: DescriptorSystem,
    rel: LinearStateMap,
    ctrl_a: Controller,
    tol: Tolerance = DEFAULT_TOLERANCE,
    certify_horizon: int | None = None,
    certify_samples: int | None = None,
    seed: int | None = None,
) -> RefinedController:
    """Refine ``ctrl_a`` into a well-posed controller of ``conc``."""
    report = check_simulation(abs_sys, conc, rel, tol)
    if not report.verdict:
        msg = "relation is not a simulation relation: " + "; ".join(report.messages)
        raise RelationRejectedError(msg, stage=STAGE_INTERFACE)

    abs_dv, conc_dv = to_dv(abs_sys, tol), to_dv(conc, tol)
    cl = closed_loop_reduce(abs_sys, ctrl_a, tol)
    schedule = abstract_s_schedule(abs_dv, cl, tol)
    iface = synthesize_interface(abs_dv, conc_dv, rel, tol)
    rc = RefinedController(Kz=cl.K, P=schedule, interface=iface, Ad=conc_dv.Ad, Bd=conc_dv.Bd, rel=rel)

    composed = composed_wellposedness(conc, rc, tol)
    if not composed.verdict:
        _raise_not_wellposed(composed, "plant with refined controller", STAGE_LIFT)

    certify_refinement(
        conc,
        abs_sys,
        ctrl_a,
        rc,
        horizon=settings.CERTIFY_HORIZON if certify_horizon is None else certify_horizon,
        samples=settings.CERTIFY_SAMPLES if certify_samples is None else certify_samples,
        seed=settings.SEED if seed is None else seed,
        tol=tol,
    )
    logger.info("refined controller built: z_dim=%d, ps=%d", rc.z_dim, conc_dv.ps)
    return rc
