"""Initial-state conditions of a graph relation.

Two directions are decided here:

* cover: every concrete initial state maps into the abstract initial set
  (H X0 is a subset of X_a0), needed by the refinement pipeline;
* simulated initial clause: every abstract initial state has a concrete
  preimage in X0.

Both tests are exact for the kind pairs they accept. Pairs without an exact
test raise :class:`UnsupportedCombinationError`.
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
from src.descriptor_refine.relations.models import LinearStateMap
from src.descriptor_refine.systems.models import InitialSet, InitialSetKind
from src.descriptor_refine.utils.exceptions import DimensionMismatchError, UnsupportedCombinationError

logger = logging.getLogger(__name__)

_LINEAR = (InitialSetKind.FULL, InitialSetKind.SUBSPACE)


def _check_dims(abs_init: InitialSet, conc_init: InitialSet, rel: LinearStateMap):
    if abs_init.dim != rel.m or conc_init.dim != rel.n:
        msg = (
            f"relation is {rel.m}x{rel.n}, initial sets have dimensions "
            f"{abs_init.dim} (abstract) and {conc_init.dim} (concrete)"
        )
        raise DimensionMismatchError(msg)


def _unsupported(test: str, abs_init: InitialSet, conc_init: InitialSet) -> UnsupportedCombinationError:
    msg = f"no exact {test} test for concrete {conc_init.kind} and abstract {abs_init.kind} initial sets"
    return UnsupportedCombinationError(msg)


def box_image(rel: LinearStateMap, lower: np.ndarray, upper: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tight componentwise bounds of H applied to the box [lower, upper]."""
    center = (lower + upper) / 2.0
    radius = (upper - lower) / 2.0
    mid = rel.H @ center
    spread = np.abs(rel.H) @ radius
    return mid - spread, mid + spread


def check_initial_cover(
    abs_init: InitialSet,
    conc_init: InitialSet,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Whether H X0 is contained in X_a0."""
    _check_dims(abs_init, conc_init, rel)
    atol = tol.residual_atol
    if abs_init.kind is InitialSetKind.FULL:
        covered = True
    elif conc_init.kind is InitialSetKind.POINTS:
        covered = all(abs_init.contains(rel.H @ point, tol) for point in conc_init.points)
    elif conc_init.kind is InitialSetKind.BOX and abs_init.kind is InitialSetKind.BOX:
        low, high = box_image(rel, conc_init.lower, conc_init.upper)
        covered = bool(np.all(low >= abs_init.lower - atol) and np.all(high <= abs_init.upper + atol))
    elif conc_init.kind in _LINEAR and abs_init.kind is InitialSetKind.SUBSPACE:
        covered = image_contained(rel.H @ conc_init.spanning_basis(), abs_init.basis, tol)
    elif conc_init.kind in _LINEAR:
        # a nonzero subspace image never fits in a bounded or finite set
        image = rel.H @ conc_init.spanning_basis()
        covered = inf_norm(image) <= atol and abs_init.contains(np.zeros(rel.m), tol)
    else:
        raise _unsupported("cover", abs_init, conc_init)
    logger.debug("initial cover (%s -> %s): %s", conc_init.kind, abs_init.kind, covered)
    return covered


def _preimage_in(conc_init: InitialSet, rel: LinearStateMap, target: np.ndarray, tol: Tolerance) -> bool:
    if conc_init.kind is InitialSetKind.POINTS:
        images = conc_init.points @ rel.H.T
        return bool(np.any(np.max(np.abs(images - target), axis=1) <= tol.residual_atol))
    _, feasible = min_norm_solve(rel.H @ conc_init.spanning_basis(), target, tol)
    return feasible


def check_init_simulated(
    abs_init: InitialSet,
    conc_init: InitialSet,
    rel: LinearStateMap,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Whether every abstract initial state has a concrete preimage in X0."""
    _check_dims(abs_init, conc_init, rel)
    if conc_init.kind is InitialSetKind.BOX:
        raise _unsupported("initial-simulation", abs_init, conc_init)

    if abs_init.kind is InitialSetKind.POINTS:
        simulated = all(_preimage_in(conc_init, rel, point, tol) for point in abs_init.points)
    elif abs_init.kind is InitialSetKind.BOX:
        # a box lies in a subspace iff its lower corner and its edge directions do
        edges = np.diag(abs_init.upper - abs_init.lower)
        simulated = _generated_set_simulated(conc_init, rel, abs_init.lower, edges, tol)
    else:
        simulated = _generated_set_simulated(conc_init, rel, np.zeros(rel.m), abs_init.spanning_basis(), tol)
    logger.debug("initial simulation (%s <- %s): %s", abs_init.kind, conc_init.kind, simulated)
    return simulated


def _generated_set_simulated(
    conc_init: InitialSet,
    rel: LinearStateMap,
    anchor: np.ndarray,
    edges: np.ndarray,
    tol: Tolerance,
) -> bool:
    if conc_init.kind in _LINEAR:
        generators = np.column_stack([anchor, edges])
        return image_contained(generators, rel.H @ conc_init.spanning_basis(), tol)
    # finite X0 can only reach a set that is a single point
    if inf_norm(edges) > tol.residual_atol:
        return False
    return _preimage_in(conc_init, rel, anchor, tol)
