"""Check records and their text / JSON rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable


@dataclass(frozen=True)
class CheckRecord:
    check: str
    location: tuple[str, ...]
    passed: bool
    residual: float | None = None
    group: str | None = None
    message: str = ""

    def sort_key(self):
        return (self.check, self.location)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "location": list(self.location),
            "passed": self.passed,
            "residual": self.residual,
            "group": self.group,
            "message": self.message,
        }


@dataclass(frozen=True)
class AuditReport:
    """Records kept sorted by check name, then location ids."""

    records: tuple[CheckRecord, ...] = ()
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(sorted(self.records, key=CheckRecord.sort_key)))

    @classmethod
    def of(cls, records: Iterable[CheckRecord], **extra) -> AuditReport:
        return cls(tuple(records), dict(extra))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        out = {
            "verdict": "pass" if self.passed else "fail",
            "checks": len(self.records),
            "failed": len(self.failures),
            "records": [r.to_dict() for r in self.records],
        }
        out.update(self.extra)
        return out

    def render_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render_text(self) -> str:
        lines = []
        for r in self.records:
            parts = ["PASS" if r.passed else "FAIL", r.check, "/".join(r.location)]
            if r.residual is not None:
                parts.append(f"residual={r.residual:.3e}")
            if r.group is not None:
                parts.append(f"group={r.group}")
            if r.message:
                parts.append(r.message)
            lines.append("  ".join(parts))
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"verdict: {verdict} ({len(self.records)} checks, {len(self.failures)} failed)")
        return "\n".join(lines) + "\n"
