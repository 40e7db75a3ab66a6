"""Graph relations, simulation verdicts and interface maps."""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.descriptor_refine.core.numkit import as_matrix, as_vector
from src.descriptor_refine.systems.io import matrix_from_payload, matrix_to_payload, read_payload, write_payload
from src.descriptor_refine.systems.schemas import RelationFile
from src.descriptor_refine.utils.exceptions import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class LinearStateMap:
    """Graph relation {(x_a, x) | x_a = H x} from concrete to abstract states."""

    H: np.ndarray

    def __post_init__(self):
        """Freeze H as a finite matrix."""
        object.__setattr__(self, "H", as_matrix(self.H, "H"))

    @property
    def m(self) -> int:
        """Abstract state dimension."""
        return self.H.shape[0]

    @property
    def n(self) -> int:
        """Concrete state dimension."""
        return self.H.shape[1]

    @classmethod
    def identity(cls, n: int) -> "LinearStateMap":
        """The diagonal relation on R^n."""
        return cls(np.eye(n))

    def apply(self, x: object) -> np.ndarray:
        """Abstract state related to the concrete state ``x``."""
        return self.H @ as_vector(x, "x", self.n)

    def compose(self, inner: "LinearStateMap") -> "LinearStateMap":
        """Relation x_a = H (H_inner x) through an intermediate system."""
        if inner.m != self.n:
            msg = f"cannot compose: inner relation maps to {inner.m} states, outer expects {self.n}"
            raise DimensionMismatchError(msg)
        return LinearStateMap(self.H @ inner.H)

    def check_dims(self, abstract_n: int, concrete_n: int):
        """Raise unless H is abstract_n x concrete_n."""
        if self.H.shape != (abstract_n, concrete_n):
            msg = f"H must be {abstract_n}x{concrete_n} (abstract x concrete), got {self.H.shape}"
            raise DimensionMismatchError(msg)


@dataclass
class SimulationReport:
    """Verdict of the graph-relation simulation test."""

    output_match: bool
    step_match: bool
    drift: np.ndarray
    initial_cover: bool
    messages: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        """All clauses hold."""
        return self.output_match and self.step_match and self.initial_cover

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "output_match": self.output_match,
            "step_match": self.step_match,
            "initial_cover": self.initial_cover,
            "verdict": self.verdict,
            "drift": np.asarray(self.drift).tolist(),
            "messages": list(self.messages),
        }


@dataclass
class BisimulationReport:
    """Forward report plus the inverse-relation test."""

    forward: SimulationReport
    backward: SimulationReport

    @property
    def verdict(self) -> bool:
        """Both directions hold."""
        return self.forward.verdict and self.backward.verdict

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "forward": self.forward.to_dict(),
            "backward": self.backward.to_dict(),
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class StepWitness:
    """A related state and abstract drive whose abstract successor has no concrete match."""

    x: np.ndarray
    s_a: np.ndarray
    abstract_successor: np.ndarray
    residual: float

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {
            "x": self.x.tolist(),
            "s_a": self.s_a.tolist(),
            "abstract_successor": self.abstract_successor.tolist(),
            "residual": self.residual,
        }


@dataclass(frozen=True, eq=False)
class InterfaceMap:
    """s = G (drift x + B_da s_a),  u = C_u x + D_u s."""

    G: np.ndarray
    drift: np.ndarray
    Bda: np.ndarray
    Cu: np.ndarray
    Du: np.ndarray

    def driving_input(self, x: np.ndarray, s_a: np.ndarray) -> np.ndarray:
        """Concrete driving input for state ``x`` and abstract drive ``s_a``."""
        return self.G @ (self.drift @ x + self.Bda @ s_a)

    def control(self, x: np.ndarray, s_a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(s, u) applied to the concrete plant."""
        s = self.driving_input(x, s_a)
        return s, self.Cu @ x + self.Du @ s

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {name: getattr(self, name).tolist() for name in ("G", "drift", "Bda", "Cu", "Du")}


def load_relation(path: str | Path) -> LinearStateMap:
    """Load a relation file with field H."""
    payload = read_payload(path, RelationFile)
    return LinearStateMap(matrix_from_payload(payload.H, "H", path))


def save_relation(rel: LinearStateMap, path: str | Path):
    """Write a relation file."""
    write_payload(path, RelationFile(H=matrix_to_payload(rel.H)))
