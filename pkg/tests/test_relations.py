"""Tests for graph simulation relations, initial-set covers and interfaces."""

import numpy as np
import pytest

from src.descriptor_refine.cli.verify_example import perturbed_relation
from src.descriptor_refine.core.numkit import inf_norm, min_norm_solve
from src.descriptor_refine.dvtransform.dv import dv_from_matrices, to_dv
from src.descriptor_refine.relations import cover, interface, simulation
from src.descriptor_refine.relations.models import LinearStateMap, load_relation, save_relation
from src.descriptor_refine.systems import catalog
from src.descriptor_refine.systems.models import InitialSet
from src.descriptor_refine.utils.exceptions import (
    DimensionMismatchError,
    InfeasibleError,
    UnsupportedCombinationError,
)
from tests.conftest import change_coordinates, random_plant


def test_worked_example_relation_is_accepted(abstract, concrete, relation):
    report = simulation.check_simulation(abstract, concrete, relation)
    assert report.verdict
    assert simulation.output_residual(abstract, concrete, relation) == 0.0
    assert report.messages == []
    assert simulation.step_witness(abstract, concrete, relation) is None


def test_identity_relation_is_accepted(concrete):
    assert simulation.check_simulation(concrete, concrete, LinearStateMap.identity(3)).verdict


def test_perturbed_relation_is_rejected_with_witness(abstract, concrete):
    rel = perturbed_relation()
    report = simulation.check_simulation(abstract, concrete, rel)
    assert not report.verdict
    assert not report.step_match
    assert not report.output_match
    witness = simulation.step_witness(abstract, concrete, rel)
    assert witness is not None
    assert witness.residual > 1e-6


def test_brute_force_oracle_confirms_rejection(abstract, concrete, rng):
    rel = perturbed_relation()
    abs_dv, conc_dv = to_dv(abstract), to_dv(concrete)
    hbd = rel.H @ conc_dv.Bd
    worst = 0.0
    for x in rng.uniform(-1.0, 1.0, size=(200, 3)):
        s_a = rng.uniform(-1.0, 1.0, size=abs_dv.ps)
        target = abs_dv.Ad @ (rel.H @ x) + abs_dv.Bd @ s_a - rel.H @ (conc_dv.Ad @ x)
        s, _ = min_norm_solve(hbd, target)
        worst = max(worst, inf_norm(hbd @ s - target))
    assert worst > 1e-6


def test_check_simulation_rejects_mismatched_outputs(abstract, concrete):
    with pytest.raises(DimensionMismatchError, match="H must be"):
        simulation.check_simulation(abstract, concrete, LinearStateMap(np.eye(3)))


def test_unsupported_cover_is_reported_not_raised(abstract, concrete, relation):
    span = InitialSet.subspace([[1.0], [0.0]])
    report = simulation.check_simulation(abstract.with_init(span), concrete, relation)
    assert not report.initial_cover
    assert any("no exact cover test" in message for message in report.messages)


def test_transitivity_on_worked_example(abstract, concrete, relation, rng):
    middle = concrete.with_init(InitialSet.full_space(3))
    moved, back = change_coordinates(middle, rng.standard_normal((3, 3)) + 3 * np.eye(3))
    assert simulation.check_simulation(abstract, middle, relation).verdict
    assert simulation.check_simulation(middle, moved, back).verdict
    assert simulation.check_simulation(abstract, moved, relation.compose(back)).verdict


def test_transitivity_on_random_triples(rng):
    for _ in range(10):
        first = random_plant(rng, n=3, p=1)
        second, h1 = change_coordinates(first, rng.standard_normal((3, 3)) + 3 * np.eye(3))
        third, h2 = change_coordinates(second, rng.standard_normal((3, 3)) + 3 * np.eye(3))
        assert simulation.check_simulation(first, second, h1).verdict
        assert simulation.check_simulation(second, third, h2).verdict
        assert simulation.check_simulation(first, third, h1.compose(h2)).verdict


def test_compose_checks_dimensions(relation):
    with pytest.raises(DimensionMismatchError, match="cannot compose"):
        relation.compose(LinearStateMap(np.eye(2)))


def test_bisimulation_of_coordinate_change(concrete, rng):
    middle = concrete.with_init(InitialSet.full_space(3))
    moved, back = change_coordinates(middle, rng.standard_normal((3, 3)) + 3 * np.eye(3))
    assert simulation.check_bisimulation(middle, moved, back).verdict


def test_bisimulation_of_worked_example(abstract, concrete, relation):
    report = simulation.check_bisimulation(abstract, concrete.with_init(InitialSet.full_space(3)), relation)
    assert report.forward.step_match
    assert report.forward.initial_cover
    assert report.backward.step_match
    assert report.backward.initial_cover
    assert report.verdict


def test_bisimulation_initial_clauses_follow_their_direction(abstract, concrete, relation):
    origin = concrete.with_init(InitialSet.from_points([[0.0, 0.0, 0.0]]))
    report = simulation.check_bisimulation(abstract, origin, relation)
    assert not report.forward.initial_cover
    assert any("no preimage" in message for message in report.forward.messages)
    assert report.backward.initial_cover
    assert report.backward.verdict

    pinned = abstract.with_init(InitialSet.from_points([[1.0, 0.0]]))
    report = simulation.check_bisimulation(pinned, concrete.with_init(InitialSet.full_space(3)), relation)
    assert report.forward.verdict
    assert not report.backward.initial_cover
    assert any("H X0" in message for message in report.backward.messages)
    assert not report.verdict


def test_cover_examples(relation):
    cube = InitialSet.box(-np.ones(3), np.ones(3))
    assert cover.check_initial_cover(InitialSet.full_space(2), cube, relation)
    zero = InitialSet.from_points([[0.0, 0.0, 0.0]])
    assert cover.check_initial_cover(InitialSet.box([-1.0, -1.0], [1.0, 1.0]), zero, relation)
    small = InitialSet.box([-0.5, -0.5], [0.5, 0.5])
    assert not cover.check_initial_cover(small, cube, relation)


def test_box_image_is_tight(relation):
    low, high = cover.box_image(relation, -np.ones(3), np.ones(3))
    np.testing.assert_allclose(low, [-1.0, -2.0])
    np.testing.assert_allclose(high, [1.0, 2.0])


def test_cover_of_subspaces(relation):
    e3 = InitialSet.subspace([[0.0], [0.0], [1.0]])
    assert cover.check_initial_cover(InitialSet.subspace([[1.0], [-1.0]]), e3, relation)
    assert not cover.check_initial_cover(InitialSet.subspace([[1.0], [1.0]]), e3, relation)
    e1 = InitialSet.subspace([[1.0], [0.0], [0.0]])
    assert cover.check_initial_cover(InitialSet.box([-1.0, -1.0], [1.0, 1.0]), e1, relation)
    assert not cover.check_initial_cover(InitialSet.box([-1.0, -1.0], [1.0, 1.0]), e3, relation)


def test_cover_without_exact_test(relation):
    cube = InitialSet.box(-np.ones(3), np.ones(3))
    with pytest.raises(UnsupportedCombinationError):
        cover.check_initial_cover(InitialSet.subspace([[1.0], [0.0]]), cube, relation)


def test_init_simulated_examples(relation):
    assert cover.check_init_simulated(InitialSet.full_space(2), InitialSet.full_space(3), relation)
    zero_a = InitialSet.from_points([[0.0, 0.0]])
    zero = InitialSet.from_points([[0.0, 0.0, 0.0]])
    assert cover.check_init_simulated(zero_a, zero, relation)
    e1 = InitialSet.subspace([[1.0], [0.0], [0.0]])
    assert not cover.check_init_simulated(InitialSet.full_space(2), e1, relation)


def test_init_simulated_boxes_and_points(relation):
    box_a = InitialSet.box([-1.0, -1.0], [1.0, 1.0])
    assert cover.check_init_simulated(box_a, InitialSet.full_space(3), relation)
    points = InitialSet.from_points([[0.0, 1.0, 1.0]])
    assert cover.check_init_simulated(InitialSet.box([1.0, 0.0], [1.0, 0.0]), points, relation)
    assert not cover.check_init_simulated(box_a, points, relation)
    with pytest.raises(UnsupportedCombinationError):
        cover.check_init_simulated(box_a, InitialSet.box(-np.ones(3), np.ones(3)), relation)


def test_cover_checks_dimensions(relation):
    with pytest.raises(DimensionMismatchError):
        cover.check_initial_cover(InitialSet.full_space(3), InitialSet.full_space(3), relation)


def test_interface_of_worked_example(abstract, concrete, relation, rng):
    abs_dv, conc_dv = to_dv(abstract), to_dv(concrete)
    iface = interface.synthesize_interface(abs_dv, conc_dv, relation)
    row = catalog.negated_interface_row()
    np.testing.assert_allclose(iface.G @ iface.Bda, [[1.0]], atol=1e-12)
    np.testing.assert_allclose(np.abs(iface.G @ iface.drift), np.abs(row), atol=1e-12)
    residual = interface.interface_residual(
        abs_dv,
        conc_dv,
        relation,
        iface,
        rng.uniform(-1.0, 1.0, size=(100, 3)),
        rng.uniform(-1.0, 1.0, size=(100, 1)),
    )
    assert residual <= 1e-8


def test_interface_under_negated_kernel_sign(relation):
    abs_dv = dv_from_matrices(catalog.negated_abstract_dv())
    conc_dv = dv_from_matrices(catalog.negated_concrete_dv())
    iface = interface.synthesize_interface(abs_dv, conc_dv, relation)
    x = np.array([0.3, -0.2, 0.7])
    s_a = np.array([0.4])
    expected = s_a - catalog.negated_interface_row() @ x
    np.testing.assert_allclose(iface.driving_input(x, s_a), expected, atol=1e-12)


def test_identity_interface_passes_drive_through(concrete):
    dv = to_dv(concrete)
    iface = interface.synthesize_interface(dv, dv, LinearStateMap.identity(3))
    np.testing.assert_allclose(iface.driving_input(np.ones(3), np.array([0.25])), [0.25], atol=1e-12)


def test_interface_infeasible_for_perturbed_relation(abstract, concrete):
    with pytest.raises(InfeasibleError, match=r"\[interface\]"):
        interface.synthesize_interface(to_dv(abstract), to_dv(concrete), perturbed_relation())


def test_save_then_load_relation(tmp_path, relation):
    path = tmp_path / "relation.json"
    save_relation(relation, path)
    np.testing.assert_array_equal(load_relation(path).H, relation.H)
