"""Closed-loop runs of a plant under a refined controller."""

import logging

import numpy as np

from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance
from src.descriptor_refine.refinement.models import RefinedController
from src.descriptor_refine.simulate.stepping import check_horizon, check_initial_state
from src.descriptor_refine.systems.models import DescriptorSystem, Trajectory

logger = logging.getLogger(__name__)


def simulate_refined(
    sys: DescriptorSystem,
    rc: RefinedController,
    x0: object,
    horizon: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> tuple[Trajectory, np.ndarray]:
    """Trajectory of ``sys`` under ``rc`` and the internal path z (one row per step)."""
    check_horizon(horizon)
    rc.check_plant(sys)
    x = check_initial_state(sys, x0, tol)
    xs = np.zeros((horizon + 1, sys.n))
    us = np.zeros((horizon, sys.p))
    zs = np.zeros((horizon + 1, rc.z_dim))
    xs[0] = x
    zs[0] = rc.initial_state(x)
    for t in range(horizon):
        s, us[t] = rc.interface.control(xs[t], rc.abstract_drive(zs[t]))
        xs[t + 1] = rc.Ad @ xs[t] + rc.Bd @ s
        zs[t + 1] = rc.Kz @ zs[t]
    logger.debug("refined closed loop simulated for %d steps", horizon)
    return Trajectory(u=us, x=xs, y=xs @ sys.C.T), zs
