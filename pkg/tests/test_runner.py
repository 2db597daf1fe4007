import unittest
from unittest.mock import patch

from towerkit.ledger import InMemoryRunLedger
from towerkit.models import Budgets, InputError, RunConfig, UndecidedError
from towerkit.runner import EXIT_FALSE, EXIT_OK, EXIT_UNDECIDED, DefaultRunner, run
from towerkit.validation import validate_document


class TestRunner(unittest.TestCase):
    def test_dr_certified(self) -> None:
        outcome = run(RunConfig("check", "dr", {"space": "fixture:wheel6"}))
        self.assertEqual(EXIT_OK, outcome.exit_code)
        cert = outcome.certificate
        self.assertEqual("Certified", cert["result"]["outcome"])
        self.assertEqual("towerkit", cert["tool"])
        self.assertEqual("check dr", cert["command"])
        self.assertEqual(Budgets().to_dict(), cert["budgets"])
        self.assertEqual([], validate_document(cert, "certificate"))

    def test_dr_refuted(self) -> None:
        outcome = run(RunConfig("check", "dr", {"space": "fixture:sphere2"}))
        self.assertEqual(EXIT_FALSE, outcome.exit_code)
        self.assertEqual(2, outcome.certificate["result"]["sphere"]["faces"])

    def test_budget_exhaustion_is_undecided(self) -> None:
        config = RunConfig("cover", options={"space": "fixture:torus1"}, budgets=Budgets(coset_limit=50))
        outcome = run(config)
        self.assertEqual(EXIT_UNDECIDED, outcome.exit_code)
        result = outcome.certificate["result"]
        self.assertEqual("Undecided", result["outcome"])
        self.assertEqual("coset_limit", result["budget"])
        self.assertEqual(50, result["limit"])

    def test_undecided_from_any_handler(self) -> None:
        with patch("towerkit.runner.dr_certify", side_effect=UndecidedError("stuck", "sphere_limit", 1)):
            outcome = run(RunConfig("check", "dr", {"space": "fixture:disk3"}))
        self.assertEqual(EXIT_UNDECIDED, outcome.exit_code)
        self.assertEqual("sphere_limit", outcome.certificate["result"]["budget"])

    def test_unknown_command(self) -> None:
        with self.assertRaises(InputError):
            run(RunConfig("teleport"))

    def test_ledger_brackets_the_run(self) -> None:
        ledger = InMemoryRunLedger()
        DefaultRunner(ledger).run(RunConfig("tower-lift", options={"map": "fixture:path2_cyc3"}))
        runner_events = ledger.list_events("runner")
        self.assertEqual(["start", "done"], [e.action for e in runner_events])
        self.assertEqual(0, runner_events[-1].data["exit_code"])
        self.assertTrue(ledger.list_events("tower"))

    def test_tower_lift_result(self) -> None:
        outcome = run(RunConfig("tower-lift", options={"map": "fixture:path2_cyc3", "mode": "f-tower"}))
        self.assertEqual(EXIT_OK, outcome.exit_code)
        result = outcome.certificate["result"]
        self.assertEqual(3, result["tower"]["length"])
        self.assertEqual([[0, 3], [0, 2]], result["complexities"])
        self.assertTrue(result["tower_check"]["ok"])

    def test_determinism(self) -> None:
        config = RunConfig("dehn", options={"space": "fixture:wheel6", "n": 4}, seed=42)
        first = run(config).certificate
        second = run(config).certificate
        self.assertEqual(first, second)
        self.assertEqual(42, first["seed"])
        self.assertEqual({"1": 0, "2": 0, "3": 1, "4": 2}, first["result"]["table"])

    def test_validate_documents(self) -> None:
        outcome = run(RunConfig("validate", options={"kind": "action", "input": "fixture:wheel6_z6"}))
        self.assertEqual(EXIT_OK, outcome.exit_code)
        self.assertEqual(6, outcome.certificate["result"]["order"])
        outcome = run(RunConfig("validate", options={"kind": "complex", "input": "fixture:oct"}))
        self.assertEqual(EXIT_FALSE, outcome.exit_code)
        self.assertFalse(outcome.certificate["result"]["valid"])

    def test_fixed_points(self) -> None:
        outcome = run(RunConfig("fixed-points", options={"action": "fixture:wheel6_z2"}))
        self.assertEqual(EXIT_OK, outcome.exit_code)
        self.assertEqual(["c"], outcome.certificate["result"]["fixed"]["vertices"])

    def test_collapse_keeps_the_one_skeleton(self) -> None:
        outcome = run(RunConfig("collapse", options={"space": "fixture:disk3"}))
        self.assertEqual(EXIT_OK, outcome.exit_code)
        remaining = outcome.certificate["result"]["remaining"]
        self.assertEqual(["v0", "v1", "v2"], remaining["vertices"])
        self.assertEqual(["-b", "-c", "b", "c"], remaining["darts"])
        self.assertEqual([], remaining["faces"])

    def test_collapse_modes_agree(self) -> None:
        plain = run(RunConfig("collapse", options={"space": "fixture:wheel6"}))
        orbitwise = run(RunConfig("collapse", options={"action": "fixture:wheel6_z6"}))
        self.assertEqual(plain.certificate["result"], orbitwise.certificate["result"])
        self.assertEqual({"vertices": 7, "edges": 6, "faces": 0}, plain.certificate["result"]["summary"])

    def test_fixture_export(self) -> None:
        outcome = run(RunConfig("fixture", options={"name": "wheel6_z3"}))
        self.assertEqual("action", outcome.certificate["result"]["kind"])
        outcome = run(RunConfig("fixture", options={"name": "oct"}))
        self.assertEqual("simplicial", outcome.certificate["result"]["kind"])


if __name__ == "__main__":
    unittest.main()
