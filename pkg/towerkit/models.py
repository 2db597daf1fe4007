from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple

# ---- Errors ----


class TowerkitError(ValueError):
    """Base class for every error raised by towerkit operations."""


class InputError(TowerkitError):
    pass


class InversionError(TowerkitError):
    pass


class NotOneConnectedError(TowerkitError):
    pass


class UndecidedError(TowerkitError):
    """A budget ran out before the question could be settled."""

    def __init__(self, message: str, budget: str = "", limit: Optional[int] = None) -> None:
        super().__init__(message)
        self.budget = budget
        self.limit = limit


class OracleUnknown(UndecidedError):
    pass


class TowerInvariantError(RuntimeError):
    """A runtime self-check of the lifting engine failed."""


# ---- Answers ----


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class WordAnswer(str, Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNKNOWN = "unknown"


class CellKind(str, Enum):
    VERTEX = "vertex"
    DART = "dart"
    FACE = "face"


# ---- Reports ----


@dataclass(frozen=True)
class ValidationReport:
    errors: Tuple[str, ...] = ()
    properties: Mapping[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> Dict[str, Any]:
        return {"valid": self.ok, "errors": list(self.errors), "properties": dict(self.properties)}


def report(errors: List[str], **properties: Any) -> ValidationReport:
    return ValidationReport(errors=tuple(errors), properties=properties)


# ---- Configuration ----


@dataclass(frozen=True)
class Budgets:
    coset_limit: int = 2000
    area_limit: int = 8
    sphere_limit: int = 4
    max_rounds: int = 16

    def __post_init__(self) -> None:
        for name in ("coset_limit", "area_limit", "sphere_limit", "max_rounds"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InputError(f"budget {name} must be an integer >= 1, got {value!r}")

    def to_dict(self) -> Dict[str, int]:
        return {
            "coset_limit": self.coset_limit,
            "area_limit": self.area_limit,
            "sphere_limit": self.sphere_limit,
            "max_rounds": self.max_rounds,
        }


@dataclass(frozen=True)
class RunConfig:
    command: str
    subcommand: Optional[str] = None
    options: Mapping[str, Any] = field(default_factory=dict)
    budgets: Budgets = field(default_factory=Budgets)
    out: Optional[str] = None
    seed: Optional[int] = None
    verbosity: int = 0
