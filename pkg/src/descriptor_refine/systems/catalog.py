"""Built-in worked example: a 3-state descriptor plant and its 2-state abstraction.

The concrete plant forces u(t) = -x3(t) and leaves x2(t+1) free. The abstract
plant is a minimal realisation with the same output map through
x_a = H x, and the abstract controller makes the abstract closed loop
x_a(t+1) = [[0, 1], [-0.5, -0.5]] x_a(t).
"""

import numpy as np

from src.descriptor_refine.systems.models import Controller, DescriptorSystem, InitialSet


def concrete_system() -> DescriptorSystem:
    """Concrete plant, initialised on the cube [-1, 1]^3."""
    return DescriptorSystem(
        E=[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
        A=[[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        B=[[1.0], [1.0], [1.0]],
        C=[[0.0, 0.2, 0.5]],
        init=InitialSet.box(-np.ones(3), np.ones(3)),
    )


def negated_concrete_dv() -> dict[str, np.ndarray]:
    """Driving-variable matrices of the concrete plant with a negative kernel sign."""
    return {
        "Ad": np.array([[-1.0, 0.0, -1.0], [0.0, 0.0, 0.0], [0.0, 1.0, -1.0]]),
        "Bd": np.array([[0.0], [-1.0], [0.0]]),
        "Cu": np.array([[0.0, 0.0, -1.0]]),
        "Du": np.array([[0.0]]),
        "C": np.array([[0.0, 0.2, 0.5]]),
    }


def abstract_system() -> DescriptorSystem:
    """Abstract plant, initialised on all of R^2."""
    return DescriptorSystem(
        E=[[0.0, 0.0], [1.0, 0.0]],
        A=[[1.0, 0.0], [0.0, 1.0]],
        B=[[1.0], [0.0]],
        C=[[0.7, 0.2]],
        init=InitialSet.full_space(2),
    )


def negated_abstract_dv() -> dict[str, np.ndarray]:
    """Driving-variable matrices of the abstract plant with a negative kernel sign."""
    return {
        "Ad": np.array([[0.0, 1.0], [0.0, 0.0]]),
        "Bd": np.array([[0.0], [-1.0]]),
        "Cu": np.array([[-1.0, 0.0]]),
        "Du": np.array([[0.0]]),
        "C": np.array([[0.7, 0.2]]),
    }


def relation_matrix() -> np.ndarray:
    """H of the graph relation x_a = H x."""
    return np.array([[0.0, 0.0, 1.0], [0.0, 1.0, -1.0]])


def abstract_controller() -> Controller:
    """[1 1] x_a(t+1) = [0.5 0.5] x_a(t) + u_a(t)."""
    return Controller(Ec=[[1.0, 1.0]], Ac=[[0.5, 0.5]], Bc=[[1.0]])


def abstract_closed_loop() -> tuple[np.ndarray, np.ndarray]:
    """Expected (K, L) of the abstract closed loop."""
    return np.array([[0.0, 1.0], [-0.5, -0.5]]), np.array([[-1.0, 0.0]])


def negated_interface_row() -> np.ndarray:
    """Row r of the interface s = s_a - r x under the negative kernel sign."""
    return np.array([[0.0, 1.0, -1.0]])
