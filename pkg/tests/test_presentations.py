import random
import unittest

from towerkit.fixtures import cycle, disk3, s3pres, sphere2, torus1, wheel, z3pres
from towerkit.models import Answer, InputError, UndecidedError, WordAnswer
from towerkit.presentations import (
    DehnSearchStrategy,
    FreeStrategy,
    ToddCoxeterStrategy,
    WordOracle,
    collapses_to_point,
    coset_enumerate,
    cyclic_reduce,
    default_oracle,
    filling_area,
    format_word,
    free_reduce,
    is_simply_connected,
    loop_word,
    parse_word,
    presentation,
)


class TestWords(unittest.TestCase):
    def test_free_reduce(self) -> None:
        word = (("a", 1), ("b", 1), ("b", -1), ("a", -1), ("a", 1))
        self.assertEqual((("a", 1),), free_reduce(word))

    def test_cyclic_reduce(self) -> None:
        word = (("a", -1), ("b", 1), ("a", 1))
        self.assertEqual((("b", 1),), cyclic_reduce(word))

    def test_format_and_parse(self) -> None:
        word = (("a", 1), ("b", -1))
        self.assertEqual("a b^-1", format_word(word))
        self.assertEqual(word, parse_word("a b^-1"))
        self.assertEqual("1", format_word(()))
        self.assertEqual((), parse_word("1"))


class TestPresentations(unittest.TestCase):
    def test_torus_presentation(self) -> None:
        p = presentation(torus1())
        self.assertEqual(("a", "b"), p.generators)
        self.assertEqual(((("a", 1), ("b", 1), ("a", -1), ("b", -1)),), p.relators)
        self.assertEqual(frozenset(), p.tree)

    def test_cycle_has_one_generator(self) -> None:
        p = presentation(cycle(3))
        self.assertEqual(1, len(p.generators))
        self.assertEqual((), p.relators)

    def test_tree_edges_drop_from_words(self) -> None:
        c = disk3()
        p = presentation(c)
        self.assertEqual(("b",), p.generators)
        self.assertEqual(((("b", 1),),), p.relators)

    def test_loop_word(self) -> None:
        c = cycle(3)
        p = presentation(c)
        word = loop_word(p, ["a", "b", "c"])
        self.assertEqual(1, len(word))
        with self.assertRaises(InputError):
            loop_word(p, ["a", "b"])

    def test_dart_loop_is_closed(self) -> None:
        c = wheel(5)
        p = presentation(c)
        for gen in p.generators:
            loop = p.dart_loop(gen)
            self.assertEqual(p.basepoint, c.src[loop[0]])
            self.assertEqual(p.basepoint, c.dst[loop[-1]])

    def test_disconnected_rejected(self) -> None:
        from towerkit.complexes import Complex2

        with self.assertRaises(InputError):
            presentation(Complex2.build(["v0", "v1"], []))


class TestCosetEnumeration(unittest.TestCase):
    def test_z3_index(self) -> None:
        table = coset_enumerate(presentation(z3pres()), [], 100)
        self.assertEqual(3, table.index)
        self.assertEqual(0, table.trace(0, (("a", 1),) * 3))

    def test_s3_index(self) -> None:
        table = coset_enumerate(presentation(s3pres()), [], 100)
        self.assertEqual(6, table.index)
        self.assertEqual(6, len(table.representatives()))

    def test_subgroup_index(self) -> None:
        table = coset_enumerate(presentation(s3pres()), [(("a", 1),)], 100)
        self.assertEqual(3, table.index)

    def test_limit_exceeded(self) -> None:
        with self.assertRaises(UndecidedError) as ctx:
            coset_enumerate(presentation(torus1()), [], 50)
        self.assertEqual("coset_limit", ctx.exception.budget)


class TestOracle(unittest.TestCase):
    def test_free_strategy(self) -> None:
        oracle = WordOracle(presentation(cycle(3)), [FreeStrategy()])
        gen = oracle.presentation.generators[0]
        self.assertEqual(WordAnswer.NONTRIVIAL, oracle.decide(((gen, 1),)))
        self.assertEqual(WordAnswer.TRIVIAL, oracle.decide(((gen, 1), (gen, -1))))

    def test_todd_coxeter_strategy(self) -> None:
        oracle = WordOracle(presentation(z3pres()), [FreeStrategy(), ToddCoxeterStrategy(100)])
        self.assertEqual(WordAnswer.TRIVIAL, oracle.decide((("a", 1),) * 3))
        self.assertEqual(WordAnswer.NONTRIVIAL, oracle.decide((("a", 1),) * 2))

    def test_dehn_search_never_answers_nontrivial(self) -> None:
        oracle = WordOracle(presentation(torus1()), [ToddCoxeterStrategy(50), DehnSearchStrategy(3)])
        self.assertEqual(WordAnswer.TRIVIAL, oracle.decide(parse_word("a b a^-1 b^-1")))
        self.assertEqual(WordAnswer.UNKNOWN, oracle.decide(parse_word("a")))

    def test_filling_area(self) -> None:
        relators = presentation(torus1()).relators
        self.assertEqual(1, filling_area(relators, parse_word("a b a^-1 b^-1"), 3))
        self.assertEqual(2, filling_area(relators, parse_word("a a b a^-1 a^-1 b^-1"), 3))
        self.assertIsNone(filling_area(relators, parse_word("a b"), 2))

    def test_answers_agree_with_the_group_on_random_words(self) -> None:
        rng = random.Random(43)
        groups = [
            (z3pres(), lambda sums: sums["a"] % 3 == 0, True),
            (cycle(1), lambda sums: sums["a"] == 0, True),
            (torus1(), lambda sums: sums["a"] == 0 and sums["b"] == 0, False),
            (disk3(), lambda sums: True, True),
        ]
        for c, is_trivial, exact in groups:
            oracle = default_oracle(c, coset_limit=100, area_limit=2)
            gens = oracle.presentation.generators
            for _ in range(250):
                word = tuple((rng.choice(gens), rng.choice((1, -1))) for _ in range(rng.randint(0, 4)))
                sums = {g: sum(e for x, e in word if x == g) for g in gens}
                expected = WordAnswer.TRIVIAL if is_trivial(sums) else WordAnswer.NONTRIVIAL
                answer = oracle.decide(word)
                if exact:
                    self.assertEqual(expected, answer, format_word(word))
                else:
                    self.assertIn(answer, (expected, WordAnswer.UNKNOWN), format_word(word))


class TestSimpleConnectivity(unittest.TestCase):
    def test_answers(self) -> None:
        self.assertEqual(Answer.YES, is_simply_connected(disk3()))
        self.assertEqual(Answer.YES, is_simply_connected(sphere2()))
        self.assertEqual(Answer.YES, is_simply_connected(wheel(6)))
        self.assertEqual(Answer.NO, is_simply_connected(cycle(4)))
        self.assertEqual(Answer.NO, is_simply_connected(z3pres()))
        self.assertEqual(Answer.UNKNOWN, is_simply_connected(torus1(), coset_limit=50))

    def test_collapses_to_point(self) -> None:
        self.assertTrue(collapses_to_point(wheel(6)))
        self.assertFalse(collapses_to_point(sphere2()))
        self.assertFalse(collapses_to_point(cycle(3)))


if __name__ == "__main__":
    unittest.main()
