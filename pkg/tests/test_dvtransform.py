"""Tests for the driving-variable transformation."""

import numpy as np
import pytest

from src.descriptor_refine.dvtransform import dv as dvmod
from src.descriptor_refine.refinement.pipeline import closed_loop_reduce
from src.descriptor_refine.systems import catalog
from src.descriptor_refine.systems.checks import membership_residual
from src.descriptor_refine.systems.models import DescriptorSystem
from src.descriptor_refine.utils.exceptions import (
    DimensionMismatchError,
    DrivingVariableMismatchError,
    NotATransitionError,
    StepMatrixRankError,
)


def test_to_dv_worked_example(concrete):
    dv = dvmod.to_dv(concrete)
    assert (dv.n, dv.p, dv.ps) == (3, 1, 1)
    np.testing.assert_allclose(concrete.step_matrix @ dv.transition, concrete.A, atol=1e-12)
    np.testing.assert_allclose(dv.kernel[:, 0], [0.0, 1.0, 0.0, 0.0], atol=1e-12)
    negated = catalog.negated_concrete_dv()
    np.testing.assert_allclose(dv.Ad, negated["Ad"], atol=1e-12)
    np.testing.assert_allclose(dv.Cu, negated["Cu"], atol=1e-12)


def test_to_dv_deterministic_system():
    a = np.array([[0.5, 1.0], [0.0, 0.2]])
    sys = DescriptorSystem(E=np.eye(2), A=a, B=np.zeros((2, 0)), C=[[1.0, 0.0]])
    dv = dvmod.to_dv(sys)
    assert dv.ps == 0
    np.testing.assert_allclose(dv.Ad, a)
    assert dv.Bd.shape == (2, 0)


def test_to_dv_abstract_system(abstract):
    dv = dvmod.to_dv(abstract)
    np.testing.assert_allclose(dv.Ad, [[0.0, 1.0], [0.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(dv.Cu, [[-1.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(np.abs(dv.kernel[:, 0]), [0.0, 1.0, 0.0], atol=1e-12)


def test_to_dv_rejects_rank_deficient_step_matrix():
    sys = DescriptorSystem(E=np.zeros((2, 2)), A=np.eye(2), B=[[1.0], [1.0]], C=[[1.0, 0.0]])
    with pytest.raises(StepMatrixRankError, match="no driving-variable form"):
        dvmod.to_dv(sys)


def test_check_dv_consistency_accepts_both_kernel_signs(concrete):
    assert dvmod.check_dv_consistency(concrete, dvmod.to_dv(concrete))
    negated = dvmod.dv_from_matrices(catalog.negated_concrete_dv())
    assert dvmod.check_dv_consistency(concrete, negated)


def test_check_dv_consistency_detects_wrong_particular_solution(concrete):
    matrices = catalog.negated_concrete_dv()
    matrices["Ad"][0, 0] = 1.0
    assert not dvmod.check_dv_consistency(concrete, dvmod.dv_from_matrices(matrices))


def test_check_dv_consistency_rejects_other_dimensions(concrete, abstract):
    with pytest.raises(DimensionMismatchError):
        dvmod.check_dv_consistency(concrete, dvmod.to_dv(abstract))


def test_recover_driving_input_of_abstract_closed_loop(abstract, abstract_controller, rng):
    cl = closed_loop_reduce(abstract, abstract_controller)
    dv = dvmod.to_dv(abstract)
    negated = dvmod.dv_from_matrices(catalog.negated_abstract_dv())
    for xa in rng.uniform(-1.0, 1.0, size=(10, 2)):
        s = dvmod.recover_driving_input(abstract, xa, cl.L @ xa, cl.K @ xa, dv=dv)
        np.testing.assert_allclose(s, [-0.5 * xa.sum()], atol=1e-12)
        s_negated = dvmod.recover_driving_input(abstract, xa, cl.L @ xa, cl.K @ xa, dv=negated)
        np.testing.assert_allclose(s_negated, [0.5 * xa.sum()], atol=1e-12)


def test_recover_driving_input_round_trip(concrete, rng):
    dv = dvmod.to_dv(concrete)
    for _ in range(20):
        x, s = rng.standard_normal(3), rng.standard_normal(1)
        x_next, u = dv.step(x, s)
        np.testing.assert_allclose(dvmod.recover_driving_input(concrete, x, u, x_next), s, atol=1e-9)


def test_recover_driving_input_rejects_non_transitions(concrete):
    x = np.zeros(3)
    with pytest.raises(NotATransitionError, match="violates"):
        dvmod.recover_driving_input(concrete, x, [0.0], [1.0, 0.0, 0.0])


def test_free_driving_keeps_input_tied_to_third_state(concrete, rng):
    dv = dvmod.to_dv(concrete)
    traj = dv.run(rng.uniform(-1.0, 1.0, size=3), rng.uniform(-1.0, 1.0, size=(30, 1)))
    np.testing.assert_allclose(traj.u[:, 0], -traj.x[:-1, 2], atol=1e-12)
    assert membership_residual(concrete, traj) <= 1e-9


def test_verify_ds_dv_equivalence(concrete):
    negated = dvmod.dv_from_matrices(catalog.negated_concrete_dv(), concrete.init)
    assert dvmod.verify_ds_dv_equivalence(concrete, negated, horizon=20, samples=100, seed=0)
    assert dvmod.verify_ds_dv_equivalence(concrete, dvmod.to_dv(concrete), horizon=0, samples=3)


def test_verify_ds_dv_equivalence_on_expanding_plant():
    expanding = DescriptorSystem(
        E=[[1.0, 0.0], [0.0, 0.0]], A=[[4.0, 1.0], [0.0, 1.0]], B=[[0.0], [1.0]], C=[[1.0, 0.0]]
    )
    dv = dvmod.to_dv(expanding)
    traj = dv.run([1.0, 0.0], np.ones((20, 1)))
    assert np.abs(traj.x).max() > 1e11
    assert dvmod.verify_ds_dv_equivalence(expanding, dv, horizon=20, samples=5)


def test_recover_driving_input_at_large_magnitude(concrete, rng):
    dv = dvmod.to_dv(concrete)
    x, s = 1e12 * rng.standard_normal(3), 1e12 * rng.standard_normal(1)
    x_next, u = dv.step(x, s)
    np.testing.assert_allclose(dvmod.recover_driving_input(concrete, x, u, x_next), s, rtol=1e-9)
    with pytest.raises(NotATransitionError, match="violates"):
        dvmod.recover_driving_input(concrete, x, u + 1e6, x_next)


def test_verify_ds_dv_equivalence_guards_consistency(concrete):
    matrices = catalog.negated_concrete_dv()
    matrices["Ad"][0, 0] = 1.0
    with pytest.raises(DrivingVariableMismatchError, match="not run"):
        dvmod.verify_ds_dv_equivalence(concrete, dvmod.dv_from_matrices(matrices), horizon=5, samples=5)


def test_save_then_load_dv(tmp_path, concrete):
    dv = dvmod.to_dv(concrete)
    path = tmp_path / "dv.json"
    dvmod.save_dv(dv, path)
    loaded = dvmod.load_dv(path)
    for name in ("Ad", "Bd", "Cu", "Du", "C"):
        np.testing.assert_array_equal(getattr(loaded, name), getattr(dv, name))
    assert loaded.init.kind is concrete.init.kind
