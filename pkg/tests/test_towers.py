import unittest

from towerkit.actions import identity_eq, trivial_action
from towerkit.complexes import Subcomplex
from towerkit.fixtures import cycle, path2_to_cyc3, vertex_to_cyc3, wheel, wheel_double_wrap, wheel_rotation
from towerkit.ledger import InMemoryRunLedger
from towerkit.maps import compose, inclusion, is_immersion, is_near_immersion
from towerkit.models import Budgets, InputError, NotOneConnectedError
from towerkit.towers import (
    LiftMode,
    StepKind,
    TowerCert,
    compose_steps,
    complexity,
    is_maximal_lift,
    max_f_tower_lift,
    max_tower_lift,
    shortest_path,
    subgroup_core,
    tower_is_identity,
    validate_tower,
)


class TestMaximality(unittest.TestCase):
    def test_map_into_cycle_is_not_maximal(self) -> None:
        m = path2_to_cyc3()
        self.assertFalse(is_maximal_lift(m, LiftMode.F_TOWER))
        self.assertFalse(is_maximal_lift(m, LiftMode.TOWER))

    def test_map_onto_disk_is_maximal(self) -> None:
        self.assertTrue(is_maximal_lift(wheel_double_wrap(2), LiftMode.F_TOWER))
        self.assertTrue(is_maximal_lift(wheel_double_wrap(2), LiftMode.TOWER))

    def test_source_must_be_one_connected(self) -> None:
        with self.assertRaises(NotOneConnectedError):
            is_maximal_lift(identity_eq(trivial_action(cycle(3))), LiftMode.TOWER)


class TestFTowerLift(unittest.TestCase):
    def test_path_into_cycle(self) -> None:
        ledger = InMemoryRunLedger()
        result = max_f_tower_lift(path2_to_cyc3(), Budgets(), ledger)
        self.assertEqual(["FullInclusion", "Cover", "FullInclusion"], result.tower.kinds())
        self.assertEqual([[0, 3], [0, 2]], [c.to_list() for c in result.complexities])
        self.assertFalse(result.tower.steps[1].complete)
        checked = validate_tower(result.tower)
        self.assertTrue(checked.ok)
        self.assertTrue(checked.properties["f_tower"])
        self.assertEqual({"vertices": 3, "edges": 2, "faces": 0}, result.lift.target.space.summary())

    def test_ledger_records_each_step(self) -> None:
        ledger = InMemoryRunLedger()
        max_f_tower_lift(path2_to_cyc3(), Budgets(), ledger)
        actions = [event.action for event in ledger.list_events("tower")]
        self.assertEqual(3, actions.count("step"))
        self.assertEqual(2, actions.count("complexity"))
        self.assertEqual("done", actions[-1])

    def test_double_wrap_needs_no_cover(self) -> None:
        m = wheel_double_wrap(2)
        result = max_f_tower_lift(m)
        self.assertEqual(["FullInclusion"], result.tower.kinds())
        self.assertTrue(result.tower.is_trivial())
        self.assertTrue(tower_is_identity(result.tower))
        self.assertEqual([1, 2], complexity(result.lift).to_list())

    def test_point_spans_itself(self) -> None:
        result = max_f_tower_lift(vertex_to_cyc3())
        self.assertEqual([StepKind.FULL_INCLUSION], [s.kind for s in result.tower.steps])


class TestTowerLift(unittest.TestCase):
    def test_point_in_cycle(self) -> None:
        result = max_tower_lift(vertex_to_cyc3())
        self.assertEqual(["Inclusion"], result.tower.kinds())
        self.assertTrue(validate_tower(result.tower).ok)

    def test_path_image_is_already_a_tree(self) -> None:
        result = max_tower_lift(path2_to_cyc3())
        self.assertEqual(["Inclusion"], result.tower.kinds())
        self.assertEqual({"vertices": 3, "edges": 2, "faces": 0}, result.lift.target.space.summary())
        self.assertTrue(is_immersion(result.tower.composite.f))


class TestTowerValidation(unittest.TestCase):
    def test_empty_tower(self) -> None:
        with self.assertRaises(InputError):
            compose_steps([])

    def test_steps_out_of_order(self) -> None:
        result = max_f_tower_lift(path2_to_cyc3())
        swapped = TowerCert(tuple(reversed(result.tower.steps)), result.tower.composite)
        self.assertFalse(validate_tower(swapped).ok)


class TestImmersionAlgebra(unittest.TestCase):
    def test_tower_composites_are_immersions(self) -> None:
        towers = [max_f_tower_lift(m).tower for m in (path2_to_cyc3(), vertex_to_cyc3(), wheel_double_wrap(2))]
        towers += [max_tower_lift(m).tower for m in (path2_to_cyc3(), vertex_to_cyc3("v1"))]
        for tower in towers:
            checked = validate_tower(tower)
            self.assertTrue(checked.ok, checked.errors)
            self.assertTrue(checked.properties["immersion"])
            self.assertTrue(is_immersion(tower.composite.f))
            self.assertTrue(is_near_immersion(tower.composite.f))

    def test_near_immersion_then_immersion(self) -> None:
        fold = wheel_double_wrap(2).f
        turn = wheel_rotation(3, 1).maps["r1"]
        composite = compose(turn, fold)
        self.assertFalse(is_immersion(fold))
        self.assertTrue(is_near_immersion(composite))
        self.assertFalse(is_immersion(composite))

    def test_immersions_compose(self) -> None:
        c = wheel(6)
        for faces in (["t0"], ["t0", "t1", "t2"], ["t1", "t4"]):
            first = inclusion(Subcomplex.closure(c, faces=faces))
            composite = compose(wheel_rotation(6, 1).maps["r2"], first)
            self.assertTrue(is_immersion(first))
            self.assertTrue(is_immersion(composite))
            self.assertTrue(is_near_immersion(composite))


class TestSubgroupCore(unittest.TestCase):
    def test_shortest_path(self) -> None:
        self.assertEqual(["-s0", "s3"], shortest_path(wheel(6), "v0", "v3"))
        self.assertEqual([], shortest_path(wheel(6), "v2", "v2"))

    def test_half_turn_core(self) -> None:
        core = subgroup_core(wheel_rotation(6, 1), ["r3"], basepoint="v0")
        self.assertEqual(2, core.action.group.order)
        self.assertEqual({"vertices": 3, "edges": 2, "faces": 0}, core.skeleton.summary())
        self.assertEqual({"vertices": 3, "edges": 2, "faces": 0}, core.core.space.summary())
        self.assertTrue(is_near_immersion(core.lift.tower.composite.f))

    def test_unknown_basepoint(self) -> None:
        with self.assertRaises(InputError):
            subgroup_core(wheel_rotation(6, 1), ["r3"], basepoint="nowhere")


if __name__ == "__main__":
    unittest.main()
