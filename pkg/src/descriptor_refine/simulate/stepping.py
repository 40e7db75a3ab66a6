"""Implicit stepping of descriptor interconnections.

Each step solves the stacked equation

    [E -B; E_c -B_c] [x(t+1); u(t)] = [A; A_c] x(t)

afresh with a column-pivoted QR factorisation and verifies the residual, so a
rank drop or an inconsistent row is reported at the step where it happens.
"""

import logging

import numpy as np
import scipy.linalg

from config.settings import settings
from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance, as_vector, inf_norm
from src.descriptor_refine.systems.models import Controller, DescriptorSystem, Trajectory
from src.descriptor_refine.utils.exceptions import (
    InitialStateOutsideSetError,
    NonUniqueError,
    NoSolutionError,
    SteppingError,
)

logger = logging.getLogger(__name__)


def check_horizon(horizon: int):
    """Reject negative horizons and horizons above the configured cap."""
    if horizon < 0:
        msg = f"horizon must be non-negative, got {horizon}"
        raise ValueError(msg)
    if horizon > settings.HORIZON_CAP:
        msg = f"horizon {horizon} exceeds the cap of {settings.HORIZON_CAP} steps"
        raise ValueError(msg)


def check_initial_state(sys: DescriptorSystem, x0: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """x0 as a vector, or InitialStateOutsideSetError."""
    x0 = as_vector(x0, "x0", sys.n)
    if not sys.init.contains(x0, tol):
        msg = f"x0 = {x0.tolist()} lies outside the {sys.init.kind} initial set"
        raise InitialStateOutsideSetError(msg)
    return x0


def step_implicit(
    lhs: np.ndarray,
    rhs: np.ndarray,
    tol: Tolerance = DEFAULT_TOLERANCE,
    split: int | None = None,
) -> np.ndarray | tuple[np.ndarray, np.ndarray]:
    """Unique solution of ``lhs @ w = rhs``.

    With ``split`` the solution is returned as ``(w[:split], w[split:])``,
    e.g. (x_next, u). ``rhs`` may carry several right-hand sides as columns.
    """
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    unknowns = lhs.shape[1]
    if lhs.shape[0] < unknowns:
        msg = f"{lhs.shape[0]} equations cannot fix {unknowns} unknowns"
        raise NonUniqueError(msg)
    q, r, perm = scipy.linalg.qr(lhs, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    if unknowns and (diagonal[0] == 0.0 or diagonal[-1] <= tol.rank_rtol * diagonal[0]):
        msg = f"stacked step matrix {lhs.shape} is rank deficient"
        raise NonUniqueError(msg)
    solution = np.zeros((unknowns, *rhs.shape[1:]))
    if unknowns:
        solution[perm] = scipy.linalg.solve_triangular(r, q.T @ rhs)
    residual = inf_norm(lhs @ solution - rhs)
    if residual > tol.residual_atol * max(1.0, inf_norm(rhs)):
        msg = f"stacked step equations are inconsistent (residual {residual:.3e})"
        raise NoSolutionError(msg)
    if split is None:
        return solution
    return solution[:split], solution[split:]


def closed_loop_matrices(sys: DescriptorSystem, ctrl: Controller) -> tuple[np.ndarray, np.ndarray]:
    """Stacked left and right factors of the plant-controller step."""
    ctrl.check_compatible(sys)
    lhs = np.block([[sys.E, -sys.B], [ctrl.Ec, -ctrl.Bc]])
    rhs = np.vstack([sys.A, ctrl.Ac])
    return lhs, rhs


def simulate_closed_loop(
    sys: DescriptorSystem,
    ctrl: Controller,
    x0: object,
    horizon: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Trajectory:
    """Unique continuation of the plant-controller interconnection from ``x0``."""
    check_horizon(horizon)
    x = check_initial_state(sys, x0, tol)
    lhs, rhs = closed_loop_matrices(sys, ctrl)
    xs = np.zeros((horizon + 1, sys.n))
    us = np.zeros((horizon, sys.p))
    xs[0] = x
    for t in range(horizon):
        try:
            xs[t + 1], us[t] = step_implicit(lhs, rhs @ xs[t], tol, split=sys.n)
        except SteppingError as exc:
            raise exc.at_step(t) from exc
    logger.debug("closed loop simulated for %d steps", horizon)
    return Trajectory(u=us, x=xs, y=xs @ sys.C.T)


def simulate_inputs(
    sys: DescriptorSystem,
    x0: object,
    inputs: object,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Trajectory:
    """Open-loop stepping of E x(t+1) = A x(t) + B u(t) with supplied inputs (one row per step).

    The continuation is unique only when E is non-singular.
    """
    inputs = np.asarray(inputs, dtype=float).reshape(-1, sys.p)
    horizon = inputs.shape[0]
    check_horizon(horizon)
    x = check_initial_state(sys, x0, tol)
    xs = np.zeros((horizon + 1, sys.n))
    xs[0] = x
    for t in range(horizon):
        try:
            xs[t + 1] = step_implicit(sys.E, sys.A @ xs[t] + sys.B @ inputs[t], tol)
        except SteppingError as exc:
            raise exc.at_step(t) from exc
    return Trajectory(u=inputs.copy(), x=xs, y=xs @ sys.C.T)
