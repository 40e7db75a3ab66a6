"""Closed abstract loops and refined controllers."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from src.descriptor_refine.core.numkit import as_matrix, inf_norm
from src.descriptor_refine.relations.models import InterfaceMap, LinearStateMap
from src.descriptor_refine.systems.io import matrix_from_payload, matrix_to_payload, read_payload, write_payload
from src.descriptor_refine.systems.models import Controller, DescriptorSystem
from src.descriptor_refine.systems.schemas import RefinedControllerFile
from src.descriptor_refine.utils.exceptions import DimensionMismatchError

_REFINED_FIELDS = ("Kz", "P", "G", "drift", "Bda", "Bd", "Ad", "Cu", "Du", "H")


@dataclass(frozen=True, eq=False)
class ClosedLoopLinear:
    """Unique continuation x_a(t+1) = K x_a(t), u_a(t) = L x_a(t)."""

    K: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        """Check K is square and L matches its width."""
        k = as_matrix(self.K, "K")
        ell = as_matrix(self.L, "L", (0, k.shape[0]) if np.size(self.L) == 0 else None)
        if k.shape[0] != k.shape[1] or ell.shape[1] != k.shape[0]:
            msg = f"closed loop needs square K and matching L, got {k.shape} and {ell.shape}"
            raise DimensionMismatchError(msg)
        object.__setattr__(self, "K", k)
        object.__setattr__(self, "L", ell)

    def residual(self, sys: DescriptorSystem, ctrl: Controller) -> float:
        """|[E; E_c] K - [A; A_c] - [B; B_c] L| on the state basis."""
        e = np.vstack([sys.E, ctrl.Ec])
        a = np.vstack([sys.A, ctrl.Ac])
        b = np.vstack([sys.B, ctrl.Bc])
        return inf_norm(e @ self.K - a - b @ self.L)

    def characteristic_polynomial(self) -> np.ndarray:
        """Monic coefficients of det(lambda I - K), highest power first."""
        return np.poly(self.K)

    def to_dict(self) -> dict:
        """JSON-ready form."""
        return {"K": self.K.tolist(), "L": self.L.tolist()}


@dataclass(frozen=True, eq=False)
class RefinedController:
    """Concrete controller built from an abstract closed loop.

    It keeps an internal copy z of the abstract state, started at z(0) = H x(0),
    and steps

        z+ = Kz z,  s_a = P z,  s = G (drift x + B_da s_a),
        B_d^T x+ = B_d^T A_d x + B_d^T B_d s,  u = C_u x + D_u s.
    """

    Kz: np.ndarray
    P: np.ndarray
    interface: InterfaceMap
    Ad: np.ndarray
    Bd: np.ndarray
    rel: LinearStateMap

    @property
    def z_dim(self) -> int:
        """Dimension of the internal abstract state."""
        return self.Kz.shape[0]

    @property
    def lift_left(self) -> np.ndarray:
        """B_d^T, the left factor of the lifting constraint."""
        return self.Bd.T

    @property
    def lift_dyn(self) -> tuple[np.ndarray, np.ndarray]:
        """(B_d^T A_d, B_d^T B_d)."""
        return self.Bd.T @ self.Ad, self.Bd.T @ self.Bd

    @property
    def out(self) -> tuple[np.ndarray, np.ndarray]:
        """(C_u, D_u)."""
        return self.interface.Cu, self.interface.Du

    def initial_state(self, x0: np.ndarray) -> np.ndarray:
        """z(0) = H x(0)."""
        return self.rel.H @ x0

    def abstract_drive(self, z: np.ndarray) -> np.ndarray:
        """s_a = P z."""
        return self.P @ z

    def check_plant(self, sys: DescriptorSystem):
        """Raise unless the controller was built for a plant of this shape."""
        if self.Ad.shape != (sys.n, sys.n) or self.interface.Cu.shape[0] != sys.p or self.rel.n != sys.n:
            msg = f"refined controller does not fit a plant with n={sys.n}, p={sys.p}"
            raise DimensionMismatchError(msg)

    def to_dict(self) -> dict:
        """Flattened matrices keyed like the controller file."""
        return {name: matrix.tolist() for name, matrix in self.matrices().items()}

    def matrices(self) -> dict[str, np.ndarray]:
        """Named matrices of the controller file."""
        iface = self.interface
        return {
            "Kz": self.Kz,
            "P": self.P,
            "G": iface.G,
            "drift": iface.drift,
            "Bda": iface.Bda,
            "Bd": self.Bd,
            "Ad": self.Ad,
            "Cu": iface.Cu,
            "Du": iface.Du,
            "H": self.rel.H,
        }


def save_refined(rc: RefinedController, path: str | Path):
    """Write a refined controller file."""
    payload = {name: matrix_to_payload(matrix) for name, matrix in rc.matrices().items()}
    write_payload(path, RefinedControllerFile(**payload))


def load_refined(path: str | Path) -> RefinedController:
    """Load a refined controller file."""
    payload = read_payload(path, RefinedControllerFile)
    m = {name: matrix_from_payload(getattr(payload, name), name, path) for name in _REFINED_FIELDS}
    return RefinedController(
        Kz=m["Kz"],
        P=m["P"],
        interface=InterfaceMap(G=m["G"], drift=m["drift"], Bda=m["Bda"], Cu=m["Cu"], Du=m["Du"]),
        Ad=m["Ad"],
        Bd=m["Bd"],
        rel=LinearStateMap(m["H"]),
    )
