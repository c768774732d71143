"""Pass/fail records shared by the verifiers."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

logger = logging.getLogger(__name__)

MAX_STORED_FAILURES = 20


@dataclass
class CheckReport:
    """Outcome of one named check.

    Failures are counted in full but only the first few messages are kept.
    """
    name: str
    passed: bool = True
    details: dict[str, Any] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    failure_count: int = 0

    def fail(self, message: str) -> None:
        self.passed = False
        self.failure_count += 1
        if len(self.failures) < MAX_STORED_FAILURES:
            self.failures.append(message)

    def require(self, condition: bool, message: str) -> bool:
        if not condition:
            self.fail(message)
        return condition

    def merge(self, other: "CheckReport", prefix: str | None = None) -> None:
        tag = prefix or other.name
        for message in other.failures:
            self.fail(f"{tag}: {message}")
        if other.failure_count > len(other.failures):
            self.failure_count += other.failure_count - len(other.failures)
            self.passed = False

    def log(self) -> None:
        if self.passed:
            logger.info(f"{self.name}: passed")
        else:
            logger.warning(f"{self.name}: {self.failure_count} failure(s); first: {self.failures[:1]}")

    def to_dict(self) -> dict[str, Any]:
        return {
            'name': self.name,
            'passed': self.passed,
            'details': self.details,
            'failures': self.failures,
            'failure_count': self.failure_count,
        }
