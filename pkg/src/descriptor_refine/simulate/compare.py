"""Finite-horizon comparison of output behaviours."""

import logging
from dataclasses import dataclass

import numpy as np

from config.settings import settings
from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance, inf_norm, min_norm_solve
from src.descriptor_refine.dvtransform.dv import to_dv
from src.descriptor_refine.relations.interface import synthesize_interface
from src.descriptor_refine.relations.models import LinearStateMap
from src.descriptor_refine.systems.models import DescriptorSystem, Trajectory
from src.descriptor_refine.utils.constants import DRIVE_HIGH, DRIVE_LOW, STAGE_INTERFACE
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, InfeasibleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonReport:
    """Worst deviations between two runs over a horizon."""

    horizon: int
    max_output_dev: float
    max_relation_dev: float
    bound: float

    @property
    def passed(self) -> bool:
        """Both deviations within the bound."""
        return self.max_output_dev <= self.bound and self.max_relation_dev <= self.bound

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "horizon": self.horizon,
            "max_output_dev": self.max_output_dev,
            "max_relation_dev": self.max_relation_dev,
            "bound": self.bound,
            "passed": self.passed,
        }


def _output_deviation(first: Trajectory, second: Trajectory) -> float:
    if first.y.shape != second.y.shape:
        msg = f"output sequences differ in shape: {first.y.shape} and {second.y.shape}"
        raise DimensionMismatchError(msg)
    return inf_norm(first.y - second.y)


def compare_outputs(first: Trajectory, second: Trajectory, bound: float | None = None) -> ComparisonReport:
    """Largest output deviation between two equally long trajectories."""
    bound = settings.COMPARE_BOUND if bound is None else bound
    return ComparisonReport(first.horizon, _output_deviation(first, second), 0.0, bound)


def compare_refined_run(
    traj: Trajectory,
    z_path: np.ndarray,
    rel: LinearStateMap,
    abs_traj: Trajectory,
    bound: float | None = None,
) -> ComparisonReport:
    """Output deviation from the abstract run plus the drift of H x(t) away from z(t)."""
    bound = settings.COMPARE_BOUND if bound is None else bound
    if z_path.shape != (traj.horizon + 1, rel.m):
        msg = f"z path has shape {z_path.shape}, expected {(traj.horizon + 1, rel.m)}"
        raise DimensionMismatchError(msg)
    relation_dev = inf_norm(traj.x @ rel.H.T - z_path)
    report = ComparisonReport(traj.horizon, _output_deviation(traj, abs_traj), relation_dev, bound)
    logger.debug("refined run comparison: %s", report.to_dict())
    return report


def witness_output_inclusion(  # noqa: PLR0913
    abs_sys: DescriptorSystem,
    conc: DescriptorSystem,
    rel: LinearStateMap,
    horizon: int,
    samples: int,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
    bound: float | None = None,
) -> ComparisonReport:
    """Replay random abstract runs on the concrete system through the interface.

    Each abstract run starts from a sample of the abstract initial set and is
    driven by uniform random s_a; the concrete run starts from the
    minimum-norm preimage of x_a(0) under H. The report carries the worst
    output and relation deviations over all samples.
    """
    bound = settings.COMPARE_BOUND if bound is None else bound
    abs_dv, conc_dv = to_dv(abs_sys, tol), to_dv(conc, tol)
    iface = synthesize_interface(abs_dv, conc_dv, rel, tol)
    rng = np.random.default_rng(seed)
    worst_output = worst_relation = 0.0
    for xa0 in abs_sys.init.sample(rng, samples):
        x0, feasible = min_norm_solve(rel.H, xa0, tol)
        if not feasible:
            msg = f"abstract initial state {xa0.tolist()} has no preimage under H"
            raise InfeasibleError(msg, stage=STAGE_INTERFACE)
        drives = rng.uniform(DRIVE_LOW, DRIVE_HIGH, size=(horizon, abs_dv.ps))
        abstract = abs_dv.run(xa0, drives)
        x = x0
        for t in range(horizon + 1):
            worst_output = max(worst_output, inf_norm(conc.C @ x - abstract.y[t]))
            worst_relation = max(worst_relation, inf_norm(rel.H @ x - abstract.x[t]))
            if t < horizon:
                s, _ = iface.control(x, drives[t])
                x = conc_dv.Ad @ x + conc_dv.Bd @ s
    report = ComparisonReport(horizon, worst_output, worst_relation, bound)
    logger.debug("output inclusion witness over %d samples: %s", samples, report.to_dict())
    return report
