"""Shared pass/fail record for verification sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class Report:
    name: str
    passed: bool = True
    checked: int = 0
    failure: Optional[dict] = None
    notes: List[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def fail(self, **info) -> None:
        """Record the first failure only; later ones are dropped."""
        if self.passed:
            self.passed = False
            self.failure = info

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checked": self.checked,
               "failure": self.failure, "notes": self.notes}
        out.update(self.data)
        return out
