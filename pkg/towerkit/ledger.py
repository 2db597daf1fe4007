from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional


@dataclass(frozen=True)
class LedgerEvent:
    event_id: str
    component: str
    action: str
    summary: str
    data: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "event_id": self.event_id,
            "component": self.component,
            "action": self.action,
            "summary": self.summary,
            "data": dict(self.data),
        }


class RunLedger:
    def record(self, component: str, action: str, summary: str, **data: Any) -> str:
        raise NotImplementedError

    def list_events(self, component: Optional[str] = None) -> List[LedgerEvent]:
        raise NotImplementedError


class InMemoryRunLedger(RunLedger):
    """Append-only event list with sequential ids ``evt-0001``, ``evt-0002``, ..."""

    def __init__(self) -> None:
        self._events: List[LedgerEvent] = []

    def record(self, component: str, action: str, summary: str, **data: Any) -> str:
        event = LedgerEvent(f"evt-{len(self._events) + 1:04d}", component, action, summary, data)
        self._events.append(event)
        return event.event_id

    def list_events(self, component: Optional[str] = None) -> List[LedgerEvent]:
        if component is None:
            return list(self._events)
        return [event for event in self._events if event.component == component]

    def to_list(self) -> List[Dict[str, Any]]:
        return [event.to_dict() for event in self._events]


class NullLedger(RunLedger):
    def record(self, component: str, action: str, summary: str, **data: Any) -> str:
        return ""

    def list_events(self, component: Optional[str] = None) -> List[LedgerEvent]:
        return []
