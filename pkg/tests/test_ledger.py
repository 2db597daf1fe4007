import unittest

from towerkit.ledger import InMemoryRunLedger, NullLedger


class TestRunLedger(unittest.TestCase):
    def test_append_only(self) -> None:
        ledger = InMemoryRunLedger()
        first = ledger.record("runner", "start", "check dr")
        second = ledger.record("tower", "step", "Cover", complete=False)
        events = ledger.list_events()
        self.assertEqual(2, len(events))
        self.assertEqual("evt-0001", first)
        self.assertEqual("evt-0002", second)
        self.assertEqual(["runner", "tower"], [e.component for e in events])

    def test_filter_by_component(self) -> None:
        ledger = InMemoryRunLedger()
        ledger.record("runner", "start", "tower-lift")
        ledger.record("tower", "complexity", "[0, 3]", round=0, value=[0, 3])
        ledger.record("runner", "done", "tower-lift", exit_code=0)
        self.assertEqual(["start", "done"], [e.action for e in ledger.list_events("runner")])

    def test_to_dict(self) -> None:
        ledger = InMemoryRunLedger()
        ledger.record("tower", "complexity", "[0, 2]", round=1, value=[0, 2])
        d = ledger.to_list()[0]
        self.assertEqual("evt-0001", d["event_id"])
        self.assertEqual("complexity", d["action"])
        self.assertEqual({"round": 1, "value": [0, 2]}, d["data"])

    def test_null_ledger_keeps_nothing(self) -> None:
        ledger = NullLedger()
        self.assertEqual("", ledger.record("tower", "done", "1 steps"))
        self.assertEqual([], ledger.list_events())


if __name__ == "__main__":
    unittest.main()
