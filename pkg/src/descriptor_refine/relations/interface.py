"""Interface synthesis for graph relations."""

import logging

import numpy as np

from src.descriptor_refine.core.numkit import (
    DEFAULT_TOLERANCE,
    Tolerance,
    image_contained,
    inf_norm,
    pseudo_inverse,
)
from src.descriptor_refine.dvtransform.dv import DrivingVariableSystem
from src.descriptor_refine.relations.models import InterfaceMap, LinearStateMap
from src.descriptor_refine.utils.constants import STAGE_INTERFACE
from src.descriptor_refine.utils.exceptions import InfeasibleError

logger = logging.getLogger(__name__)


def relation_drift(abs_dv: DrivingVariableSystem, conc_dv: DrivingVariableSystem, rel: LinearStateMap) -> np.ndarray:
    """A_da H - H A_d: abstract successor offset not produced by the concrete drift."""
    rel.check_dims(abs_dv.n, conc_dv.n)
    return abs_dv.Ad @ rel.H - rel.H @ conc_dv.Ad


def synthesize_interface(
    abs_dv: DrivingVariableSystem,
    conc_dv: DrivingVariableSystem,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> InterfaceMap:
    """Interface keeping x_a = H x along every abstract transition.

    s = G (drift x + B_da s_a) with G the minimum-norm solve factor of H B_d,
    certified on the basis of (x, s_a).
    """
    drift = relation_drift(abs_dv, conc_dv, rel)
    hbd = rel.H @ conc_dv.Bd
    if not (image_contained(drift, hbd, tol) and image_contained(abs_dv.Bd, hbd, tol)):
        msg = "abstract successors leave the reach of H B_d; no interface exists for this relation"
        raise InfeasibleError(msg, stage=STAGE_INTERFACE)
    g = pseudo_inverse(hbd, tol)
    targets = np.hstack([drift, abs_dv.Bd])
    residual = inf_norm(hbd @ g @ targets - targets)
    scale = max(1.0, inf_norm(targets))
    if residual > tol.residual_atol * scale:
        msg = f"interface residual {residual:.3e} on the input basis exceeds tolerance"
        raise InfeasibleError(msg, stage=STAGE_INTERFACE)
    logger.debug("interface synthesized: G %s, residual %.2e", g.shape, residual)
    return InterfaceMap(G=g, drift=drift, Bda=abs_dv.Bd, Cu=conc_dv.Cu, Du=conc_dv.Du)


def interface_residual(
    abs_dv: DrivingVariableSystem,
    conc_dv: DrivingVariableSystem,
    rel: LinearStateMap,
    iface: InterfaceMap,
    states: np.ndarray,
    drives: np.ndarray,
) -> float:
    """Largest |H (A_d x + B_d s) - A_da H x - B_da s_a| over paired samples (one per row)."""
    states = np.atleast_2d(states)
    drives = np.asarray(drives, dtype=float).reshape(states.shape[0], -1)
    worst = 0.0
    for x, s_a in zip(states, drives, strict=True):
        s = iface.driving_input(x, s_a)
        concrete = rel.H @ (conc_dv.Ad @ x + conc_dv.Bd @ s)
        abstract = abs_dv.Ad @ (rel.H @ x) + abs_dv.Bd @ s_a
        worst = max(worst, inf_norm(concrete - abstract))
    return worst
