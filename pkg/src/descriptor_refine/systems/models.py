"""Descriptor systems, controllers, initial sets and trajectories."""

from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import numpy as np
import pandas as pd

from src.descriptor_refine.core.numkit import (
    DEFAULT_TOLERANCE,
    Tolerance,
    as_matrix,
    as_vector,
    min_norm_solve,
)
from src.descriptor_refine.utils.constants import INIT_BOX, INIT_FULL, INIT_POINTS, INIT_SUBSPACE
from src.descriptor_refine.utils.exceptions import DimensionMismatchError


class InitialSetKind(StrEnum):
    """Representations of an initial-state set."""

    FULL = INIT_FULL
    SUBSPACE = INIT_SUBSPACE
    BOX = INIT_BOX
    POINTS = INIT_POINTS


@dataclass(frozen=True, eq=False)
class InitialSet:
    """A set of admissible initial states in R^dim."""

    kind: InitialSetKind
    dim: int
    basis: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    points: np.ndarray | None = None

    def __post_init__(self):
        """Check that the payload of each kind matches ``dim``."""
        if self.dim < 1:
            msg = f"initial set dimension must be positive, got {self.dim}"
            raise DimensionMismatchError(msg)
        if self.kind is InitialSetKind.SUBSPACE:
            if self.basis is None or self.basis.shape[0] != self.dim:
                msg = f"subspace basis must have {self.dim} rows"
                raise DimensionMismatchError(msg)
        elif self.kind is InitialSetKind.BOX:
            if self.lower is None or self.upper is None or self.lower.size != self.dim or self.upper.size != self.dim:
                msg = f"box bounds must both have length {self.dim}"
                raise DimensionMismatchError(msg)
            if np.any(self.lower > self.upper):
                msg = "box lower bound exceeds upper bound"
                raise ValueError(msg)
        elif self.kind is InitialSetKind.POINTS and (self.points is None or self.points.shape[1] != self.dim):
            msg = f"points must have length {self.dim}"
            raise DimensionMismatchError(msg)

    @classmethod
    def full_space(cls, dim: int) -> "InitialSet":
        """All of R^dim."""
        return cls(InitialSetKind.FULL, dim)

    @classmethod
    def subspace(cls, basis: object) -> "InitialSet":
        """The column span of ``basis``."""
        basis = as_matrix(basis, "basis")
        return cls(InitialSetKind.SUBSPACE, basis.shape[0], basis=basis)

    @classmethod
    def box(cls, lower: object, upper: object) -> "InitialSet":
        """The axis-aligned box [lower, upper]."""
        lower = as_vector(lower, "lower")
        upper = as_vector(upper, "upper")
        return cls(InitialSetKind.BOX, lower.size, lower=lower, upper=upper)

    @classmethod
    def from_points(cls, points: object) -> "InitialSet":
        """A finite set of states, one per row."""
        points = as_matrix(points, "points")
        return cls(InitialSetKind.POINTS, points.shape[1], points=points)

    def spanning_basis(self) -> np.ndarray:
        """Basis of the linear set for FULL and SUBSPACE kinds."""
        if self.kind is InitialSetKind.FULL:
            return np.eye(self.dim)
        if self.kind is InitialSetKind.SUBSPACE:
            return self.basis
        msg = f"{self.kind} initial set is not a linear subspace"
        raise ValueError(msg)

    def contains(self, x: object, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        """Whether ``x`` lies in the set (within ``residual_atol``)."""
        x = as_vector(x, "state", self.dim)
        atol = tol.residual_atol
        if self.kind is InitialSetKind.FULL:
            return True
        if self.kind is InitialSetKind.BOX:
            return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))
        if self.kind is InitialSetKind.POINTS:
            return bool(np.any(np.max(np.abs(self.points - x), axis=1) <= atol))
        _, feasible = min_norm_solve(self.basis, x, tol)
        return feasible

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Draw ``count`` states, one per row.

        Boxes are sampled uniformly, linear sets through standard normal
        coordinates, and finite point sets are cycled in order.
        """
        if self.kind is InitialSetKind.BOX:
            return rng.uniform(self.lower, self.upper, size=(count, self.dim))
        if self.kind is InitialSetKind.POINTS:
            index = np.arange(count) % self.points.shape[0]
            return self.points[index].copy()
        basis = self.spanning_basis()
        return rng.standard_normal((count, basis.shape[1])) @ basis.T


@dataclass(frozen=True, eq=False)
class DescriptorSystem:
    """Discrete-time descriptor system E x(t+1) = A x(t) + B u(t), y = C x."""

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    init: InitialSet | None = None

    def __post_init__(self):
        """Convert and cross-check all matrix dimensions."""
        e = as_matrix(self.E, "E")
        n = e.shape[0]
        if e.shape != (n, n):
            msg = f"E must be square, got {e.shape}"
            raise DimensionMismatchError(msg)
        a = as_matrix(self.A, "A")
        if a.shape != (n, n):
            msg = f"A must be {n}x{n} like E, got {a.shape}"
            raise DimensionMismatchError(msg)
        b = as_matrix(self.B, "B", (n, 0) if np.size(self.B) == 0 else None)
        if b.shape[0] != n:
            msg = f"B must have {n} rows, got {b.shape[0]}"
            raise DimensionMismatchError(msg)
        c = as_matrix(self.C, "C")
        if c.shape[1] != n:
            msg = f"C must have {n} columns, got {c.shape[1]}"
            raise DimensionMismatchError(msg)
        init = self.init or InitialSet.full_space(n)
        if init.dim != n:
            msg = f"initial set has dimension {init.dim}, system has {n} states"
            raise DimensionMismatchError(msg)
        for name, value in (("E", e), ("A", a), ("B", b), ("C", c), ("init", init)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        """State dimension."""
        return self.E.shape[0]

    @property
    def p(self) -> int:
        """Input dimension."""
        return self.B.shape[1]

    @property
    def k(self) -> int:
        """Output dimension."""
        return self.C.shape[0]

    @property
    def step_matrix(self) -> np.ndarray:
        """M = [E -B], the coefficient of (x(t+1), u(t))."""
        return np.hstack([self.E, -self.B])

    def with_init(self, init: InitialSet) -> "DescriptorSystem":
        """Copy of this system with another initial set."""
        return DescriptorSystem(self.E, self.A, self.B, self.C, init)


@dataclass(frozen=True, eq=False)
class Controller:
    """Descriptor-form control law E_c x(t+1) = A_c x(t) + B_c u(t)."""

    Ec: np.ndarray
    Ac: np.ndarray
    Bc: np.ndarray

    def __post_init__(self):
        """Check that the three blocks stack row-wise."""
        ec = as_matrix(self.Ec, "Ec")
        ac = as_matrix(self.Ac, "Ac")
        bc = as_matrix(self.Bc, "Bc")
        if not ec.shape[0] == ac.shape[0] == bc.shape[0]:
            msg = f"controller blocks have different row counts: {ec.shape[0]}, {ac.shape[0]}, {bc.shape[0]}"
            raise DimensionMismatchError(msg)
        if ec.shape[1] != ac.shape[1]:
            msg = f"Ec and Ac must have the same column count, got {ec.shape[1]} and {ac.shape[1]}"
            raise DimensionMismatchError(msg)
        for name, value in (("Ec", ec), ("Ac", ac), ("Bc", bc)):
            object.__setattr__(self, name, value)

    @classmethod
    def empty(cls, n: int, p: int) -> "Controller":
        """Controller imposing no constraint at all."""
        return cls(np.zeros((0, n)), np.zeros((0, n)), np.zeros((0, p)))

    @property
    def rows(self) -> int:
        """Number of controller equations."""
        return self.Ec.shape[0]

    def check_compatible(self, sys: DescriptorSystem):
        """Raise unless the controller shares (u, x) with ``sys``."""
        if self.Ec.shape[1] != sys.n or self.Bc.shape[1] != sys.p:
            msg = (
                f"controller acts on {self.Ec.shape[1]} states and {self.Bc.shape[1]} inputs, "
                f"plant has {sys.n} states and {sys.p} inputs"
            )
            raise DimensionMismatchError(msg)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Finite-horizon sample of a behaviour.

    ``x`` and ``y`` hold ``horizon + 1`` rows, ``u`` holds ``horizon`` rows:
    the last state has no input attached.
    """

    u: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        """Check row counts against the horizon."""
        horizon = self.x.shape[0] - 1
        if horizon < 0 or self.u.shape[0] != horizon or self.y.shape[0] != horizon + 1:
            msg = f"trajectory rows inconsistent: u {self.u.shape}, x {self.x.shape}, y {self.y.shape}"
            raise DimensionMismatchError(msg)

    @property
    def horizon(self) -> int:
        """Number of steps T."""
        return self.x.shape[0] - 1

    def to_frame(self) -> pd.DataFrame:
        """Table with columns t, u1..up, x1..xn, y1..yk; last row has empty u cells."""
        horizon = self.horizon
        p, n, k = self.u.shape[1], self.x.shape[1], self.y.shape[1]
        u = np.vstack([self.u, np.full((1, p), np.nan)])
        frame = pd.DataFrame({"t": np.arange(horizon + 1)})
        for prefix, block, width in (("u", u, p), ("x", self.x, n), ("y", self.y, k)):
            for j in range(width):
                frame[f"{prefix}{j + 1}"] = block[:, j]
        return frame

    def to_csv(self, path: str | Path):
        """Write the trajectory table as CSV."""
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(output_path, index=False, float_format="%.17g")


@dataclass
class ValidationReport:
    """Outcome of the standing rank assumptions on a descriptor system."""

    rank_b_ok: bool
    rank_c_ok: bool
    step_matrix_ok: bool
    messages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """All checks succeeded."""
        return self.rank_b_ok and self.rank_c_ok and self.step_matrix_ok

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "rank_b_ok": self.rank_b_ok,
            "rank_c_ok": self.rank_c_ok,
            "step_matrix_ok": self.step_matrix_ok,
            "passed": self.passed,
            "messages": list(self.messages),
        }
