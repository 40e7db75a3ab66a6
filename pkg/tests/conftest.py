"""Pytest fixtures for DescriptorRefine tests."""

import numpy as np
import pytest

from src.descriptor_refine.dvtransform.dv import to_dv
from src.descriptor_refine.relations.models import LinearStateMap
from src.descriptor_refine.systems import catalog
from src.descriptor_refine.systems.models import Controller, DescriptorSystem, InitialSet

SEED = 20240611


@pytest.fixture
def rng():
    """Seeded generator shared by property tests."""
    return np.random.default_rng(SEED)


@pytest.fixture
def concrete():
    """Concrete worked-example plant on the cube [-1, 1]^3."""
    return catalog.concrete_system()


@pytest.fixture
def abstract():
    """Abstract worked-example plant on R^2."""
    return catalog.abstract_system()


@pytest.fixture
def relation():
    """Relation x_a = H x of the worked example."""
    return LinearStateMap(catalog.relation_matrix())


@pytest.fixture
def abstract_controller():
    """Controller [1 1] x_a+ = [0.5 0.5] x_a + u_a."""
    return catalog.abstract_controller()


def feedback_controller(sys: DescriptorSystem, gain: np.ndarray) -> Controller:
    """Controller fixing the driving input to s = gain x."""
    dv = to_dv(sys)
    n, p, ps = sys.n, sys.p, dv.ps
    return Controller(
        Ec=np.vstack([dv.Bd.T, np.zeros((p, n))]),
        Ac=np.vstack([dv.Bd.T @ (dv.Ad + dv.Bd @ gain), dv.Cu + dv.Du @ gain]),
        Bc=np.vstack([np.zeros((ps, p)), -np.eye(p)]),
    )


def random_plant(rng, n=3, p=1, k=1, singular=True):
    """Random plant with rank(E) = n - 1 (or n) meeting the rank assumptions."""
    u, _ = np.linalg.qr(rng.standard_normal((n, n)))
    v, _ = np.linalg.qr(rng.standard_normal((n, n)))
    spectrum = rng.uniform(0.5, 2.0, size=n)
    if singular:
        spectrum[-1] = 0.0
    return DescriptorSystem(
        E=u @ np.diag(spectrum) @ v.T,
        A=rng.standard_normal((n, n)),
        B=rng.standard_normal((n, p)),
        C=rng.standard_normal((k, n)),
    )


def random_wellposed_pair(rng, n=3, p=1, k=1):
    """Random plant and a well-posed controller whose closed loop is stable."""
    plant = random_plant(rng, n, p, k, singular=rng.random() < 0.5)
    dv = to_dv(plant)
    gain = rng.standard_normal((dv.ps, n))
    closed = dv.Ad + dv.Bd @ gain
    # A and the gain scale the closed loop jointly
    scale = 1.25 * max(1.0, float(np.max(np.abs(np.linalg.eigvals(closed)))))
    plant = DescriptorSystem(plant.E, plant.A / scale, plant.B, plant.C)
    return plant, feedback_controller(plant, gain / scale)


def change_coordinates(sys: DescriptorSystem, transform: np.ndarray) -> tuple[DescriptorSystem, LinearStateMap]:
    """System in coordinates x' = T x, and the relation x = T^-1 x' back to ``sys``."""
    inverse = np.linalg.inv(transform)
    moved = DescriptorSystem(
        E=sys.E @ inverse,
        A=sys.A @ inverse,
        B=sys.B,
        C=sys.C @ inverse,
        init=InitialSet.full_space(sys.n),
    )
    return moved, LinearStateMap(inverse)


@pytest.fixture
def wellposed_pairs(rng):
    """Twenty random well-posed plant-controller pairs."""
    return [random_wellposed_pair(rng, n=int(rng.integers(2, 5)), p=int(rng.integers(1, 3))) for _ in range(20)]
