"""Rank tests for well-posed interconnections."""

import logging
from dataclasses import dataclass

import numpy as np

from src.descriptor_refine.core.numkit import DEFAULT_TOLERANCE, Tolerance, rank_of
from src.descriptor_refine.systems.models import Controller, DescriptorSystem
from src.descriptor_refine.utils.constants import CONDITION_EXISTENCE, CONDITION_UNIQUENESS
from src.descriptor_refine.utils.exceptions import DimensionMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WellPosednessReport:
    """Ranks of the stacked step equations and the two conditions they decide."""

    rank_lhs: int
    rank_aug: int
    unknowns: int

    @property
    def existence_ok(self) -> bool:
        """The right-hand side adds no rank: every state has a continuation."""
        return self.rank_lhs == self.rank_aug

    @property
    def uniqueness_ok(self) -> bool:
        """The left-hand side has full column rank."""
        return self.rank_lhs == self.unknowns

    @property
    def verdict(self) -> bool:
        """Existence and uniqueness both hold."""
        return self.existence_ok and self.uniqueness_ok

    @property
    def failing_condition(self) -> str | None:
        """First failing condition, or None."""
        if not self.existence_ok:
            return CONDITION_EXISTENCE
        if not self.uniqueness_ok:
            return CONDITION_UNIQUENESS
        return None

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "rank_lhs": self.rank_lhs,
            "rank_aug": self.rank_aug,
            "unknowns": self.unknowns,
            "existence_ok": self.existence_ok,
            "uniqueness_ok": self.uniqueness_ok,
            "verdict": self.verdict,
        }


def check_stacked_wellposed(
    lhs: np.ndarray,
    rhs: np.ndarray,
    unknowns: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> WellPosednessReport:
    """Rank test of lhs @ unknowns = rhs @ knowns for all knowns."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if lhs.shape[0] != rhs.shape[0] or lhs.shape[1] != unknowns:
        msg = f"stacked equations inconsistent: lhs {lhs.shape}, rhs {rhs.shape}, {unknowns} unknowns"
        raise DimensionMismatchError(msg)
    report = WellPosednessReport(
        rank_lhs=rank_of(lhs, tol),
        rank_aug=rank_of(np.hstack([lhs, rhs]), tol),
        unknowns=unknowns,
    )
    logger.debug("well-posedness ranks: %s", report.to_dict())
    return report


def check_wellposed(
    sys: DescriptorSystem,
    ctrl: Controller,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> WellPosednessReport:
    """rank [E B; E_c B_c] against rank [E B A; E_c B_c A_c] and n + p."""
    ctrl.check_compatible(sys)
    lhs = np.block([[sys.E, sys.B], [ctrl.Ec, ctrl.Bc]])
    rhs = np.vstack([sys.A, ctrl.Ac])
    return check_stacked_wellposed(lhs, rhs, sys.n + sys.p, tol)
