"""Report objects returned by the verifier suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["CheckResult", "Report", "PASS", "FAIL", "NOT_APPLICABLE"]

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not applicable"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    witness: Optional[str] = None

    def as_dict(self) -> dict:
        d = {"name": self.name, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    results: list = field(default_factory=list)

    def add(self, name: str, status: str, witness: str = None):
        self.results.append(CheckResult(name, status, witness))

    @property
    def passed(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if r.status == FAIL]

    def by_name(self, name: str) -> list:
        return [r for r in self.results if r.name == name]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [r.as_dict() for r in self.results],
        }

    def __repr__(self):
        lines = [f"{r.name}: {r.status}" + (f" ({r.witness})" if r.witness else "") for r in self.results]
        return "Report[\n  " + "\n  ".join(lines) + "\n]"
