import io
import json
import subprocess
import tempfile
import unittest
from contextlib import redirect_stderr
from pathlib import Path
from unittest.mock import patch

from towerkit.cli import main
from towerkit.models import TowerInvariantError
from towerkit.runner import EXIT_INTERNAL


def _run(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        ["python3", "-m", "towerkit.cli", *args],
        capture_output=True,
        text=True,
        check=False,
    )


class TestCLIGolden(unittest.TestCase):
    def test_dr_certified(self) -> None:
        result = _run("check", "dr", "--space", "fixture:wheel6", "--seed", "42")
        self.assertEqual(0, result.returncode)
        self.assertIn("Certified", result.stdout)
        cert = json.loads(result.stdout)
        self.assertEqual(42, cert["seed"])
        self.assertEqual("check dr", cert["command"])

    def test_dr_refuted(self) -> None:
        result = _run("check", "dr", "--space", "fixture:sphere2")
        self.assertEqual(1, result.returncode)
        self.assertIn("Refuted", result.stdout)

    def test_bad_map_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "map.json"
            path.write_text("{\"source\": ", encoding="utf-8")
            result = _run("tower-lift", "--map", str(path))
        self.assertEqual(3, result.returncode)
        self.assertIn("error:", result.stderr)

    def test_usage_error_is_input_error(self) -> None:
        result = _run("check", "no-such-check")
        self.assertEqual(3, result.returncode)

    def test_certificate_written_to_file(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp) / "cert.json"
            result = _run("fixture", "disk3", "--out", str(out))
            self.assertEqual(0, result.returncode)
            self.assertEqual("", result.stdout)
            cert = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual([{"id": "f", "boundary": ["a", "b", "c"]}], cert["result"]["document"]["faces"])

    def test_complex_file_with_face_list(self) -> None:
        doc = {
            "vertices": ["p", "q", "r"],
            "edges": [{"id": "x", "from": "p", "to": "q"}, {"id": "y", "from": "q", "to": "r"},
                      {"id": "z", "from": "p", "to": "r"}],
            "faces": [{"id": "t", "boundary": ["x", "y", "-z"]}],
        }
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "disk.json"
            path.write_text(json.dumps(doc), encoding="utf-8")
            result = _run("check", "dr", "--space", str(path))
        self.assertEqual(0, result.returncode)
        self.assertIn("Certified", result.stdout)


class TestCLIErrors(unittest.TestCase):
    def test_self_check_failure_has_its_own_exit_code(self) -> None:
        stderr = io.StringIO()
        with patch("towerkit.cli.run", side_effect=TowerInvariantError("complexity did not drop")):
            with redirect_stderr(stderr):
                code = main(["check", "dr", "--space", "fixture:disk3"])
        self.assertEqual(EXIT_INTERNAL, code)
        self.assertIn("internal error: complexity did not drop", stderr.getvalue())


if __name__ == "__main__":
    unittest.main()
