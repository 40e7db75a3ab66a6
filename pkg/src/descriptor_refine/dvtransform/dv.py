"""Driving-variable form of a descriptor system.

With M = [E -B] of full row rank, every transition (x, u, x+) of
E x+ = A x + B u is parametrised by a free driving input s through

    [x+; u] = M^+ A x + N s,   im N = ker M,   N^T N = I,

so the non-determinism of the descriptor system becomes an ordinary input
of the deterministic system x+ = A_d x + B_d s, u = C_u x + D_u s.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.descriptor_refine.core.numkit import (
    DEFAULT_TOLERANCE,
    Tolerance,
    as_matrix,
    as_vector,
    inf_norm,
    is_orthonormal,
    kernel_onb,
    rank_of,
    right_inverse,
)
from src.descriptor_refine.systems.checks import membership_residual
from src.descriptor_refine.systems.io import (
    init_from_payload,
    init_to_payload,
    matrix_from_payload,
    matrix_to_payload,
    read_payload,
    write_payload,
)
from src.descriptor_refine.systems.models import DescriptorSystem, InitialSet, Trajectory
from src.descriptor_refine.systems.schemas import DrivingVariableFile
from src.descriptor_refine.utils.constants import DRIVE_HIGH, DRIVE_LOW
from src.descriptor_refine.utils.exceptions import (
    DimensionMismatchError,
    DrivingVariableMismatchError,
    NotATransitionError,
    RankDeficientError,
    StepMatrixRankError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DrivingVariableSystem:
    """x+ = A_d x + B_d s,  u = C_u x + D_u s,  y = C x."""

    Ad: np.ndarray
    Bd: np.ndarray
    Cu: np.ndarray
    Du: np.ndarray
    C: np.ndarray
    init: InitialSet | None = None

    def __post_init__(self):
        """Convert and cross-check the block dimensions."""
        ad = as_matrix(self.Ad, "Ad")
        n = ad.shape[0]
        if ad.shape != (n, n):
            msg = f"Ad must be square, got {ad.shape}"
            raise DimensionMismatchError(msg)
        bd = as_matrix(self.Bd, "Bd", (n, 0) if np.size(self.Bd) == 0 else None)
        cu = as_matrix(self.Cu, "Cu", (0, n) if np.size(self.Cu) == 0 else None)
        ps, p = bd.shape[1], cu.shape[0]
        du = as_matrix(self.Du, "Du", (p, ps) if np.size(self.Du) == 0 else None)
        c = as_matrix(self.C, "C")
        if bd.shape[0] != n or cu.shape[1] != n or c.shape[1] != n:
            msg = f"Bd, Cu and C must all match {n} states"
            raise DimensionMismatchError(msg)
        if du.shape != (p, ps):
            msg = f"Du must be {p}x{ps}, got {du.shape}"
            raise DimensionMismatchError(msg)
        init = self.init or InitialSet.full_space(n)
        if init.dim != n:
            msg = f"initial set has dimension {init.dim}, DV system has {n} states"
            raise DimensionMismatchError(msg)
        for name, value in (("Ad", ad), ("Bd", bd), ("Cu", cu), ("Du", du), ("C", c), ("init", init)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        """State dimension."""
        return self.Ad.shape[0]

    @property
    def p(self) -> int:
        """Dimension of the original input u."""
        return self.Cu.shape[0]

    @property
    def ps(self) -> int:
        """Dimension of the driving input s."""
        return self.Bd.shape[1]

    @property
    def k(self) -> int:
        """Output dimension."""
        return self.C.shape[0]

    @property
    def transition(self) -> np.ndarray:
        """[A_d; C_u], the particular solution M^+ A."""
        return np.vstack([self.Ad, self.Cu])

    @property
    def kernel(self) -> np.ndarray:
        """N = [B_d; D_u], the kernel basis of M."""
        return np.vstack([self.Bd, self.Du])

    def step(self, x: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One step: returns (x_next, u)."""
        return self.Ad @ x + self.Bd @ s, self.Cu @ x + self.Du @ s

    def run(self, x0: object, drives: object) -> Trajectory:
        """Trajectory in (u, x, y) driven by ``drives`` (one row per step)."""
        x = as_vector(x0, "x0", self.n)
        drives = np.asarray(drives, dtype=float).reshape(-1, self.ps)
        horizon = drives.shape[0]
        xs = np.zeros((horizon + 1, self.n))
        us = np.zeros((horizon, self.p))
        xs[0] = x
        for t in range(horizon):
            xs[t + 1], us[t] = self.step(xs[t], drives[t])
        return Trajectory(u=us, x=xs, y=xs @ self.C.T)


def to_dv(sys: DescriptorSystem, tol: Tolerance = DEFAULT_TOLERANCE) -> DrivingVariableSystem:
    """Driving-variable system of ``sys`` with the Moore-Penrose right inverse."""
    m = sys.step_matrix
    try:
        m_plus = right_inverse(m, tol)
    except RankDeficientError as exc:
        msg = f"[E -B] has rank {rank_of(m, tol)} < {sys.n}; no driving-variable form exists"
        raise StepMatrixRankError(msg) from exc
    particular = m_plus @ sys.A
    kernel = kernel_onb(m, tol)
    n = sys.n
    dv = DrivingVariableSystem(
        Ad=particular[:n],
        Bd=kernel[:n],
        Cu=particular[n:],
        Du=kernel[n:],
        C=sys.C,
        init=sys.init,
    )
    logger.debug("driving-variable form: n=%d p=%d ps=%d", dv.n, dv.p, dv.ps)
    return dv


def _check_pair_dimensions(sys: DescriptorSystem, dv: DrivingVariableSystem):
    if dv.n != sys.n or dv.p != sys.p or dv.k != sys.k:
        msg = f"DV system (n={dv.n}, p={dv.p}, k={dv.k}) does not match (n={sys.n}, p={sys.p}, k={sys.k})"
        raise DimensionMismatchError(msg)


def check_dv_consistency(
    sys: DescriptorSystem,
    dv: DrivingVariableSystem,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Whether ``dv`` parametrises exactly the transitions of ``sys``.

    Any right inverse and any orthonormal kernel basis is accepted: the test
    is M [A_d; C_u] = A, M N = 0, N^T N = I and width(N) = dim ker M.
    """
    _check_pair_dimensions(sys, dv)
    m = sys.step_matrix
    particular_residual = inf_norm(m @ dv.transition - sys.A)
    kernel_residual = inf_norm(m @ dv.kernel)
    orthonormal = is_orthonormal(dv.kernel, tol)
    nullity = m.shape[1] - rank_of(m, tol)
    consistent = (
        particular_residual <= tol.residual_atol
        and kernel_residual <= tol.residual_atol
        and orthonormal
        and dv.ps == nullity
    )
    logger.debug(
        "DV consistency: particular %.2e, kernel %.2e, orthonormal %s, width %d/%d -> %s",
        particular_residual,
        kernel_residual,
        orthonormal,
        dv.ps,
        nullity,
        consistent,
    )
    return consistent


def recover_driving_input(
    sys: DescriptorSystem,
    x: object,
    u: object,
    x_next: object,
    tol: Tolerance = DEFAULT_TOLERANCE,
    dv: DrivingVariableSystem | None = None,
) -> np.ndarray:
    """Driving input s with [x_next; u] = [A_d; C_u] x + N s.

    ``dv`` fixes the kernel basis (and so the sign of s); it defaults to
    ``to_dv(sys)``.
    """
    x = as_vector(x, "x", sys.n)
    u = as_vector(u, "u", sys.p)
    x_next = as_vector(x_next, "x_next", sys.n)
    scale = max(1.0, inf_norm(x), inf_norm(u), inf_norm(x_next))
    residual = inf_norm(sys.E @ x_next - sys.A @ x - sys.B @ u)
    if residual > tol.residual_atol * scale:
        msg = f"(x, u, x_next) violates E x+ = A x + B u by {residual:.3e} (scale {scale:.3e})"
        raise NotATransitionError(msg)
    dv = dv or to_dv(sys, tol)
    offset = np.concatenate([x_next, u]) - dv.transition @ x
    s = dv.kernel.T @ offset
    mismatch = inf_norm(dv.kernel @ s - offset)
    if mismatch > tol.residual_atol * scale:
        msg = f"transition is not reproduced by the DV parametrisation (residual {mismatch:.3e})"
        raise NotATransitionError(msg)
    return s


def _trajectory_scale(traj) -> float:
    # residuals of an expanding run grow with its magnitude
    return max(1.0, inf_norm(traj.x), inf_norm(traj.u))


def verify_ds_dv_equivalence(  # noqa: PLR0913
    sys: DescriptorSystem,
    dv: DrivingVariableSystem,
    horizon: int,
    samples: int,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Randomised finite-horizon check that ``sys`` and ``dv`` have equal behaviour.

    DV trajectories must satisfy the descriptor equations, and descriptor
    transition chains (built from the constructive parametrisation of ``sys``)
    must be reproduced by ``dv`` with the recovered driving inputs.
    """
    if not check_dv_consistency(sys, dv, tol):
        msg = "DV system is not consistent with its descriptor system; equivalence check not run"
        raise DrivingVariableMismatchError(msg)
    rng = np.random.default_rng(seed)
    reference = to_dv(sys, tol)
    starts = sys.init.sample(rng, samples)

    for index, x0 in enumerate(starts):
        drives = rng.uniform(DRIVE_LOW, DRIVE_HIGH, size=(horizon, dv.ps))
        traj = dv.run(x0, drives)
        residual = membership_residual(sys, traj)
        if residual > tol.residual_atol * _trajectory_scale(traj):
            logger.info("sample %d: DV trajectory leaves the descriptor behaviour (%.3e)", index, residual)
            return False

        chain = reference.run(x0, rng.uniform(DRIVE_LOW, DRIVE_HIGH, size=(horizon, reference.ps)))
        bound = tol.residual_atol * _trajectory_scale(chain)
        for t in range(horizon):
            s = recover_driving_input(sys, chain.x[t], chain.u[t], chain.x[t + 1], tol, dv=dv)
            x_next, u = dv.step(chain.x[t], s)
            deviation = max(inf_norm(x_next - chain.x[t + 1]), inf_norm(u - chain.u[t]))
            if deviation > bound:
                logger.info("sample %d, t=%d: DV misses a descriptor transition (%.3e)", index, t, deviation)
                return False
    logger.debug("DS/DV equivalence holds on %d samples of horizon %d", samples, horizon)
    return True


def dv_from_matrices(matrices: dict[str, np.ndarray], init: InitialSet | None = None) -> DrivingVariableSystem:
    """DV system from a mapping with keys Ad, Bd, Cu, Du, C."""
    return DrivingVariableSystem(
        Ad=matrices["Ad"],
        Bd=matrices["Bd"],
        Cu=matrices["Cu"],
        Du=matrices["Du"],
        C=matrices["C"],
        init=init,
    )


def save_dv(dv: DrivingVariableSystem, path: str | Path):
    """Write a DV system file."""
    write_payload(
        path,
        DrivingVariableFile(
            Ad=matrix_to_payload(dv.Ad),
            Bd=matrix_to_payload(dv.Bd),
            Cu=matrix_to_payload(dv.Cu),
            Du=matrix_to_payload(dv.Du),
            C=matrix_to_payload(dv.C),
            init=init_to_payload(dv.init),
        ),
    )


def load_dv(path: str | Path) -> DrivingVariableSystem:
    """Load a DV system file."""
    payload = read_payload(path, DrivingVariableFile)
    ad = matrix_from_payload(payload.Ad, "Ad", path)
    return DrivingVariableSystem(
        Ad=ad,
        Bd=matrix_from_payload(payload.Bd, "Bd", path),
        Cu=matrix_from_payload(payload.Cu, "Cu", path),
        Du=matrix_from_payload(payload.Du, "Du", path),
        C=matrix_from_payload(payload.C, "C", path),
        init=init_from_payload(payload.init, ad.shape[0], path),
    )
