"""Standing-assumption checks and behaviour membership."""

import logging

from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance, inf_norm, rank_of
from src.descriptor_refine.systems.models import DescriptorSystem, Trajectory, ValidationReport
from src.descriptor_refine.utils.exceptions import DimensionMismatchError

logger = logging.getLogger(__name__)


def validate(sys: DescriptorSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> ValidationReport:
    """Check rank(B) = p, rank(C) = k and full row rank of [E -B].

    Failures are collected in ``messages``; nothing is raised.
    """
    messages = []
    rank_b = rank_of(sys.B, tol)
    rank_b_ok = rank_b == sys.p
    if not rank_b_ok:
        messages.append(f"B has rank {rank_b}, expected full column rank {sys.p}")
    rank_c = rank_of(sys.C, tol)
    rank_c_ok = rank_c == sys.k
    if not rank_c_ok:
        messages.append(f"C has rank {rank_c}, expected full row rank {sys.k}")
    rank_m = rank_of(sys.step_matrix, tol)
    step_matrix_ok = rank_m == sys.n
    if not step_matrix_ok:
        messages.append(f"[E -B] has rank {rank_m}, expected full row rank {sys.n}")
    report = ValidationReport(rank_b_ok, rank_c_ok, step_matrix_ok, messages)
    logger.debug("validate n=%d p=%d k=%d: %s", sys.n, sys.p, sys.k, report.to_dict())
    return report


def membership_residual(sys: DescriptorSystem, traj: Trajectory) -> float:
    """Largest violation of the descriptor and output equations along ``traj``."""
    if traj.x.shape[1] != sys.n or traj.u.shape[1] != sys.p or traj.y.shape[1] != sys.k:
        msg = (
            f"trajectory widths (u {traj.u.shape[1]}, x {traj.x.shape[1]}, y {traj.y.shape[1]}) "
            f"do not match system (p {sys.p}, n {sys.n}, k {sys.k})"
        )
        raise DimensionMismatchError(msg)
    x_now, x_next = traj.x[:-1], traj.x[1:]
    dynamics = x_next @ sys.E.T - x_now @ sys.A.T - traj.u @ sys.B.T
    output = traj.y - traj.x @ sys.C.T
    return max(inf_norm(dynamics), inf_norm(output))
