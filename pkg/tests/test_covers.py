import unittest

from towerkit.actions import EqMap, trivial_action, validate_action, validate_eq_map
from towerkit.covers import (
    intermediate_lift,
    is_h_regular,
    lazy_cover,
    lazy_span,
    lift_eq_map,
    lifted_group,
    universal_cover_finite,
    verify_lifted_group,
)
from towerkit.fixtures import cycle, disk3, disk3_to_z3pres, s3pres, sphere2_swap, torus1, z3pres
from towerkit.maps import from_dart_map, is_covering, validate_map
from towerkit.models import InputError, NotOneConnectedError, OracleUnknown, UndecidedError
from towerkit.presentations import (
    DehnSearchStrategy,
    FreeStrategy,
    ToddCoxeterStrategy,
    WordOracle,
    parse_word,
    presentation,
)


class TestFiniteCovers(unittest.TestCase):
    def test_z3pres_universal_cover(self) -> None:
        cover = universal_cover_finite(z3pres(), 100)
        self.assertEqual(3, cover.sheets)
        self.assertEqual({"vertices": 3, "edges": 3, "faces": 3}, cover.complex.summary())
        self.assertTrue(validate_map(cover.projection).ok)
        self.assertTrue(is_covering(cover.projection))
        self.assertTrue(validate_action(cover.deck).ok)

    def test_s3pres_universal_cover(self) -> None:
        cover = universal_cover_finite(s3pres(), 100)
        self.assertEqual(6, cover.sheets)
        self.assertEqual(6, cover.deck.group.order)
        self.assertTrue(is_covering(cover.projection))

    def test_simply_connected_base_is_its_own_cover(self) -> None:
        cover = universal_cover_finite(disk3(), 100)
        self.assertEqual(1, cover.sheets)
        self.assertEqual(disk3().vertices, cover.complex.vertices)

    def test_infinite_group_is_undecided(self) -> None:
        with self.assertRaises(UndecidedError):
            universal_cover_finite(torus1(), 50)


class TestLazyCover(unittest.TestCase):
    def test_cycle_unrolls(self) -> None:
        c = cycle(3)
        cover = lazy_cover(c, WordOracle(presentation(c), [FreeStrategy()]))
        path = ["a", "b", "c", "a", "b", "c"]
        end = cover.endpoint(cover.basepoint, path)
        self.assertNotEqual(cover.basepoint, end)
        self.assertEqual("v0", cover.base_of(end))
        self.assertEqual(3, len(cover.vertices_over("v0")))

    def test_relator_loop_closes(self) -> None:
        c = z3pres()
        cover = lazy_cover(c, WordOracle(presentation(c), [FreeStrategy(), ToddCoxeterStrategy(100)]))
        self.assertEqual(cover.basepoint, cover.endpoint(cover.basepoint, ["a", "a", "a"]))
        self.assertNotEqual(cover.basepoint, cover.endpoint(cover.basepoint, ["a"]))

    def test_unknown_answer_aborts(self) -> None:
        c = torus1()
        cover = lazy_cover(c, WordOracle(presentation(c), [DehnSearchStrategy(1)]))
        with self.assertRaises(OracleUnknown):
            cover.endpoint(cover.basepoint, ["a"])

    def test_lazy_span_of_face(self) -> None:
        c = z3pres()
        oracle = WordOracle(presentation(c), [FreeStrategy(), ToddCoxeterStrategy(100)])
        cover = lazy_cover(c, oracle)
        start = cover.basepoint
        ring = [start, cover.endpoint(start, ["a"]), cover.endpoint(start, ["a", "a"])]
        region, projection = lazy_span(cover, ring)
        self.assertEqual({"vertices": 3, "edges": 3, "faces": 3}, region.summary())
        self.assertTrue(validate_map(projection).ok)


class TestLiftedGroups(unittest.TestCase):
    def test_z3pres_lifted_group(self) -> None:
        lg = lifted_group(trivial_action(z3pres()), 100)
        self.assertEqual(3, lg.group.order)
        self.assertEqual(3, len(lg.kernel))
        self.assertTrue(verify_lifted_group(lg).ok)

    def test_sphere_swap_lifted_group(self) -> None:
        lg = lifted_group(sphere2_swap(), 100)
        self.assertEqual(2, lg.group.order)
        self.assertEqual(frozenset(["e|0"]), lg.kernel)
        checked = verify_lifted_group(lg)
        self.assertTrue(checked.ok)
        self.assertEqual(1, checked.properties["pi1_order"])

    def test_every_subgroup_is_regular_for_trivial_base_group(self) -> None:
        a = trivial_action(s3pres())
        self.assertTrue(is_h_regular([parse_word("a b a b a b")], a, 100))
        self.assertFalse(is_h_regular([parse_word("a")], a, 100))

    def test_intermediate_cover_of_s3(self) -> None:
        lift = intermediate_lift([parse_word("a b")], trivial_action(s3pres()), 100)
        self.assertEqual(2, lift.sheets)
        self.assertTrue(validate_eq_map(lift.eq_map).ok)
        self.assertEqual(2, len(lift.complex.vertices))

    def test_intermediate_cover_rejects_irregular_subgroup(self) -> None:
        with self.assertRaises(InputError):
            intermediate_lift([parse_word("a")], trivial_action(s3pres()), 100)


class TestLiftEqMap(unittest.TestCase):
    def test_lift_triangle_into_z3_cover(self) -> None:
        m = disk3_to_z3pres()
        lg = lifted_group(m.target, 100)
        lifted = lift_eq_map(m, lg)
        self.assertTrue(validate_eq_map(lifted).ok)
        self.assertEqual(3, len(set(lifted.f.vmap.values())))

    def test_source_must_be_one_connected(self) -> None:
        c = cycle(3)
        lg = lifted_group(trivial_action(z3pres()), 100)
        f = from_dart_map(c, z3pres(), {v: "v" for v in c.vertices}, {"a": "a", "b": "a", "c": "a"})
        m = EqMap(trivial_action(c), lg.base_action, f, {"e": "e"})
        with self.assertRaises(NotOneConnectedError):
            lift_eq_map(m, lg)


if __name__ == "__main__":
    unittest.main()
