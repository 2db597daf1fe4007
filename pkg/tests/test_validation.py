import unittest

from towerkit.models import InputError
from towerkit.validation import load_schema, validate_document, validate_required_fields


class TestValidation(unittest.TestCase):
    def test_complex_valid(self) -> None:
        payload = {
            "vertices": ["v0", "v1"],
            "edges": [{"id": "a", "from": "v0", "to": "v1"}],
            "faces": [{"id": "f", "boundary": ["a", "-a"]}],
        }
        self.assertEqual([], validate_document(payload, "complex2"))

    def test_complex_missing_field(self) -> None:
        errors = validate_document({"vertices": ["v0"]}, "complex2")
        self.assertIn("Missing required field: edges", errors)

    def test_nested_edge_missing_field(self) -> None:
        payload = {"vertices": ["v0"], "edges": [{"id": "a", "from": "v0"}]}
        errors = validate_document(payload, "complex2")
        self.assertIn("edges[0]: Missing required field: to", errors)

    def test_wrong_type(self) -> None:
        errors = validate_document({"vertices": "v0", "edges": []}, "complex2")
        self.assertIn("Field vertices expected array", errors)

    def test_face_entries_are_checked(self) -> None:
        payload = {"vertices": ["v0"], "edges": [], "faces": [{"id": "f", "boundary": "a"}]}
        errors = validate_document(payload, "complex2")
        self.assertIn("faces[0]: Field boundary expected array", errors)

    def test_map_entries_are_checked(self) -> None:
        payload = {"vertex_map": {"v0": 1}, "edge_map": {}, "face_map": {"f": {"rot": 1}}}
        errors = validate_document(payload, "map")
        self.assertIn("Field vertex_map.v0 expected string", errors)
        self.assertIn("face_map.f: Missing required field: image", errors)

    def test_action_needs_table_or_generators(self) -> None:
        errors = validate_document({"space": "fixture:disk3"}, "action")
        self.assertEqual(1, len(errors))
        self.assertIn("Expected one of", errors[0])
        self.assertEqual([], validate_document({"space": "fixture:disk3", "permgens": {}}, "action"))

    def test_angle_minimum(self) -> None:
        payload = {"angles": [{"face": "f", "corners": [{"num": 1, "den": 0}]}]}
        errors = validate_document(payload, "angles")
        self.assertIn("angles[0]: corners[0]: Field den must be >= 1", errors)

    def test_certificate_schema(self) -> None:
        schema = load_schema("certificate.schema.json")
        payload = {
            "tool": "towerkit",
            "version": "0.1.0",
            "command": "check dr",
            "budgets": {"coset_limit": 1, "area_limit": 1, "sphere_limit": 1, "max_rounds": 1},
            "seed": None,
            "result": {},
        }
        self.assertEqual([], validate_required_fields(payload, schema))
        payload["tool"] = "other"
        self.assertIn("Field tool must be one of ['towerkit']", validate_required_fields(payload, schema))

    def test_schema_name_cannot_escape(self) -> None:
        with self.assertRaises(InputError):
            load_schema("../pyproject.toml")
        with self.assertRaises(InputError):
            load_schema("missing.schema.json")


if __name__ == "__main__":
    unittest.main()
