"""Check results and the JSON report format."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

PASS = "PASS"
PASS_PROVED = "PASS-PROVED"
PASS_EMPIRICAL = "PASS-EMPIRICAL"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
UNDEFINED = "UNDEFINED"

VERDICTS = (PASS, PASS_PROVED, PASS_EMPIRICAL, FAIL, INCONCLUSIVE, UNDEFINED)
PASSING = (PASS, PASS_PROVED, PASS_EMPIRICAL)


@dataclass
class CheckResult:
    verdict: str
    margin: float
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.verdict in PASSING


@dataclass
class ReportEntry:
    check: str
    anchor: str
    verdict: str
    margin: float
    witness: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")


@dataclass
class Report:
    entries: list[ReportEntry] = field(default_factory=list)

    def add(self, check: str, anchor: str, result: CheckResult | None = None, *,
            verdict: str | None = None, margin: float = 0.0, witness: Any = None):
        if result is not None:
            verdict, margin, witness = result.verdict, result.margin, result.witness
        self.entries.append(ReportEntry(check, anchor, verdict, float(margin), witness))

    @property
    def failed(self) -> bool:
        return any(e.verdict == FAIL for e in self.entries)

    def exit_code(self) -> int:
        return 2 if self.failed else 0

    def sorted(self) -> "Report":
        return Report(sorted(self.entries, key=lambda e: e.check))

    def to_json(self) -> str:
        return json.dumps({"entries": [_clean(asdict(e)) for e in self.entries]}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        entries = []
        for e in data["entries"]:
            e = dict(e)
            e["margin"] = float(e["margin"])  # "inf"/"nan" come back as strings
            entries.append(ReportEntry(**e))
        return cls(entries)

    def to_text(self) -> str:
        width = max((len(e.check) for e in self.entries), default=0)
        lines = []
        for e in self.entries:
            line = f"{e.check:<{width}}  {e.verdict:<14}  margin={e.margin:.6g}  [{e.anchor}]"
            if e.witness is not None and e.verdict not in PASSING:
                line += f"\n    witness: {json.dumps(_clean(e.witness))}"
            lines.append(line)
        return "\n".join(lines)


def _clean(obj):
    """Make floats JSON-safe (inf/nan become strings)."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj
