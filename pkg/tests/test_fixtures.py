import unittest

from towerkit.actions import FinAction, validate_action, validate_eq_map
from towerkit.complexes import Complex2, SimpComplex, validate_complex
from towerkit.fixtures import eqmap_fixture, fixture_names, fixtures, map_fixture_names, wheel, wheel_rotation
from towerkit.models import InputError


class TestCatalog(unittest.TestCase):
    def test_every_entry_is_valid(self) -> None:
        for name in fixture_names():
            if "<" in name:
                continue
            item = fixtures(name)
            if isinstance(item, FinAction):
                self.assertTrue(validate_action(item).ok, name)
            elif isinstance(item, Complex2):
                self.assertTrue(validate_complex(item).ok, name)
            else:
                self.assertIsInstance(item, SimpComplex)

    def test_every_map_is_equivariant(self) -> None:
        for name in map_fixture_names():
            self.assertTrue(validate_eq_map(eqmap_fixture(name)).ok, name)

    def test_sized_families(self) -> None:
        self.assertEqual({"vertices": 5, "edges": 5, "faces": 0}, fixtures("cyc5").summary())
        self.assertEqual({"vertices": 9, "edges": 16, "faces": 8}, fixtures("Wheel8").summary())

    def test_unknown_names(self) -> None:
        with self.assertRaises(InputError):
            fixtures("klein")
        with self.assertRaises(InputError):
            eqmap_fixture("klein_torus")
        with self.assertRaises(InputError):
            wheel(2)
        with self.assertRaises(InputError):
            wheel_rotation(6, 4)


if __name__ == "__main__":
    unittest.main()
