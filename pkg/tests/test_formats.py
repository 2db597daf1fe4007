import json
import random
import tempfile
import unittest
from fractions import Fraction
from pathlib import Path

from towerkit.complexes import Complex2, SimpComplex, Subcomplex, barycentric_subdivision, rename_cells
from towerkit.fixtures import (
    cycle,
    disk3,
    octahedron,
    path2,
    s3pres,
    sphere2,
    sphere2_swap,
    torus1,
    wheel,
    wheel_double_wrap,
    wheel_rotation,
    z3pres,
)
from towerkit.formats import (
    action_from_doc,
    action_to_doc,
    angles_from_doc,
    angles_to_doc,
    complex_from_doc,
    complex_to_doc,
    dump_json,
    eqmap_from_doc,
    map_from_doc,
    map_to_doc,
    read_json,
    simplicial_from_doc,
    simplicial_to_doc,
)
from towerkit.maps import FaceImage, compose, identity_map, inclusion
from towerkit.models import InputError


class TestComplexDocuments(unittest.TestCase):
    def test_complex_document(self) -> None:
        doc = complex_to_doc(disk3())
        self.assertEqual([{"id": "f", "boundary": ["a", "b", "c"]}], doc["faces"])
        self.assertEqual(disk3(), complex_from_doc(doc))

    def test_fixture_reference(self) -> None:
        self.assertEqual(7, len(complex_from_doc("fixture:wheel6").vertices))
        self.assertEqual(7, len(complex_from_doc("fixture:wheel6_z6").vertices))

    def test_bad_references(self) -> None:
        with self.assertRaises(InputError):
            complex_from_doc("wheel6")
        with self.assertRaises(InputError):
            complex_from_doc("fixture:oct")
        with self.assertRaises(InputError):
            complex_from_doc("fixture:nope")

    def test_open_face_rejected(self) -> None:
        doc = {
            "vertices": ["v0", "v1", "v2"],
            "edges": [{"id": "a", "from": "v0", "to": "v1"}, {"id": "b", "from": "v1", "to": "v2"}],
            "faces": [{"id": "f", "boundary": ["a", "b"]}],
        }
        with self.assertRaises(InputError):
            complex_from_doc(doc)

    def test_published_complex_shape(self) -> None:
        doc = {
            "vertices": ["v0", "v1", "v2"],
            "edges": [
                {"id": "a", "from": "v0", "to": "v1"},
                {"id": "b", "from": "v1", "to": "v2"},
                {"id": "c", "from": "v2", "to": "v0"},
            ],
            "faces": [{"id": "f", "boundary": ["a", "b", "c"]}],
        }
        self.assertEqual(disk3(), complex_from_doc(doc))
        self.assertEqual(doc, complex_to_doc(disk3()))

    def test_duplicate_face_id_rejected(self) -> None:
        doc = complex_to_doc(disk3())
        doc["faces"].append({"id": "f", "boundary": ["a", "b", "c"]})
        with self.assertRaises(InputError):
            complex_from_doc(doc)

    def test_schema_errors_are_input_errors(self) -> None:
        with self.assertRaises(InputError):
            complex_from_doc({"vertices": ["v0"]})
        with self.assertRaises(InputError):
            complex_from_doc(["v0"])

    def test_simplicial_document(self) -> None:
        doc = simplicial_to_doc(octahedron())
        self.assertEqual(8, len(doc["simplices"]))
        self.assertEqual(octahedron(), simplicial_from_doc(doc))
        with self.assertRaises(InputError):
            simplicial_from_doc("fixture:disk3")


class TestMapAndActionDocuments(unittest.TestCase):
    def test_map_completes_reverse_darts_and_faces(self) -> None:
        doc = {"vertex_map": {"v0": "v", "v1": "v", "v2": "v"}, "edge_map": {"a": "a", "b": "a", "c": "a"}}
        m = map_from_doc(doc, disk3(), z3pres())
        self.assertEqual("-a", m.dmap["-c"])
        self.assertEqual("f", m.fmap["f"].image)

    def test_unknown_dart_in_map(self) -> None:
        doc = {"vertex_map": {}, "edge_map": {"x": "a"}}
        with self.assertRaises(InputError):
            map_from_doc(doc, disk3(), z3pres())

    def test_edge_map_reads_reversed_darts(self) -> None:
        doc = {"vertex_map": {"v0": "v0", "v1": "v0", "v2": "v0"}, "edge_map": {"a": "a", "b": "-a"}}
        m = map_from_doc(doc, path2(), cycle(1))
        self.assertEqual("-a", m.dmap["b"])
        self.assertEqual("a", m.dmap["-b"])

    def test_edge_map_must_cover_and_agree(self) -> None:
        with self.assertRaises(InputError):
            map_from_doc({"vertex_map": {}, "edge_map": {"a": "a"}}, path2(), cycle(1))
        with self.assertRaises(InputError):
            map_from_doc({"vertex_map": {}, "edge_map": {"a": "a", "-a": "a", "b": "a"}}, path2(), cycle(1))

    def test_explicit_face_map_is_kept(self) -> None:
        doc = {
            "vertex_map": {"v0": "v", "v1": "v", "v2": "v"},
            "edge_map": {"a": "a", "b": "a", "c": "a"},
            "face_map": {"f": {"image": "f", "rot": 2, "flip": False}},
        }
        self.assertEqual(FaceImage("f", 2, False), map_from_doc(doc, disk3(), z3pres()).fmap["f"])

    def test_map_document_shape(self) -> None:
        doc = map_to_doc(identity_map(disk3()))
        self.assertEqual({"a": "a", "b": "b", "c": "c"}, doc["edge_map"])
        self.assertEqual({"v0": "v0", "v1": "v1", "v2": "v2"}, doc["vertex_map"])
        self.assertEqual({"f": {"image": "f", "rot": 0, "flip": False}}, doc["face_map"])

    def test_action_from_generators(self) -> None:
        turn = {"vertex_map": {"v0": "v1", "v1": "v2", "v2": "v0"}, "edge_map": {"a": "b", "b": "c", "c": "a"}}
        a = action_from_doc({"space": "fixture:disk3", "permgens": {"r": turn}})
        self.assertEqual(3, a.group.order)

    def test_action_table_document(self) -> None:
        doc = action_to_doc(wheel_rotation(6, 2))
        a = action_from_doc(doc)
        self.assertEqual(("r0", "r2", "r4"), a.group.elements)
        self.assertEqual("r0", a.group.mul("r2", "r4"))

    def test_broken_action_rejected(self) -> None:
        doc = action_to_doc(wheel_rotation(6, 2))
        doc["mul"]["r2,r2"] = "r0"
        with self.assertRaises(InputError):
            action_from_doc(doc)

    def test_eqmap_defaults_to_trivial_groups(self) -> None:
        doc = {
            "source": "fixture:disk3",
            "target": "fixture:z3pres",
            "map": {"vertex_map": {"v0": "v", "v1": "v", "v2": "v"}, "edge_map": {"a": "a", "b": "a", "c": "a"}},
        }
        m = eqmap_from_doc(doc)
        self.assertEqual({"e": "e"}, dict(m.fsharp))
        self.assertEqual(1, m.source.group.order)

    def test_eqmap_fixture(self) -> None:
        m = eqmap_from_doc("fixture:wheel6_wheel3")
        self.assertEqual(3, m.source.group.order)


class TestAngleDocuments(unittest.TestCase):
    def test_angles_are_exact(self) -> None:
        doc = {"angles": [{"face": "f", "corners": [{"num": 1, "den": 3}, {"num": 2, "den": 6}]}]}
        angles = angles_from_doc(doc)
        self.assertEqual([Fraction(1, 3), Fraction(1, 3)], angles["f"])
        self.assertEqual([{"num": 1, "den": 3}] * 2, angles_to_doc(angles)["angles"][0]["corners"])

    def test_zero_denominator_rejected(self) -> None:
        with self.assertRaises(InputError):
            angles_from_doc({"angles": [{"face": "f", "corners": [{"num": 1, "den": 0}]}]})


class TestReadJson(unittest.TestCase):
    def test_invalid_json(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.json"
            path.write_text("{not json", encoding="utf-8")
            with self.assertRaises(InputError):
                read_json(path)

    def test_valid_json(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "space.json"
            path.write_text(json.dumps(complex_to_doc(disk3())), encoding="utf-8")
            self.assertEqual(disk3(), complex_from_doc(read_json(path)))


def _reload(doc: dict) -> dict:
    return json.loads(dump_json(doc))


def _random_complex(rng: random.Random) -> Complex2:
    c = rng.choice([wheel(6), torus1(), sphere2(), s3pres(), barycentric_subdivision(disk3())])
    sub = Subcomplex.closure(
        c,
        [v for v in c.vertices if rng.random() < 0.3],
        [d for d in c.edges if rng.random() < 0.3],
        [f for f in c.face_ids if rng.random() < 0.5] or [c.face_ids[0]],
    ).to_complex()
    cells = list(sub.vertices) + list(sub.edges) + list(sub.face_ids)
    fresh = [f"{rng.choice('pqr')}{i}" for i in range(len(cells))]
    rng.shuffle(fresh)
    return rename_cells(sub, dict(zip(cells, fresh)))


class TestRoundTrips(unittest.TestCase):
    def test_complexes(self) -> None:
        rng = random.Random(29)
        for _ in range(100):
            c = _random_complex(rng)
            self.assertEqual(c, complex_from_doc(_reload(complex_to_doc(c))))

    def test_simplicial_complexes(self) -> None:
        rng = random.Random(31)
        for _ in range(100):
            vertices = [f"x{i}" for i in range(rng.randint(1, 7))]
            simplices = [rng.sample(vertices, rng.randint(1, min(3, len(vertices)))) for _ in range(rng.randint(0, 6))]
            s = SimpComplex.build(vertices, simplices)
            self.assertEqual(s, simplicial_from_doc(_reload(simplicial_to_doc(s))))

    def test_angles(self) -> None:
        rng = random.Random(37)
        for _ in range(100):
            angles = {
                f"f{i}": [Fraction(rng.randint(0, 12), rng.randint(1, 12)) for _ in range(rng.randint(1, 6))]
                for i in range(rng.randint(0, 4))
            }
            self.assertEqual(angles, angles_from_doc(_reload(angles_to_doc(angles))))

    def test_maps(self) -> None:
        rng = random.Random(41)
        c = wheel(6)
        outers = [identity_map(c), wheel_rotation(6).maps["r2"], wheel_double_wrap(2).f]
        for _ in range(60):
            sub = Subcomplex.closure(c, faces=[f for f in c.face_ids if rng.random() < 0.5])
            m = compose(rng.choice(outers), inclusion(sub))
            loaded = map_from_doc(_reload(map_to_doc(m)), m.source, m.target)
            self.assertTrue(loaded.same_as(m))

    def test_actions(self) -> None:
        for a in (wheel_rotation(6, 1), wheel_rotation(6, 3), wheel_rotation(4, 2), sphere2_swap()):
            loaded = action_from_doc(_reload(action_to_doc(a)))
            self.assertEqual(a.space, loaded.space)
            self.assertEqual(a.group.elements, loaded.group.elements)
            for g in a.group.elements:
                self.assertTrue(loaded.maps[g].same_as(a.maps[g]))


if __name__ == "__main__":
    unittest.main()
