"""Machine-readable check reports with a published JSON schema.

Every CLI command emits one CheckReport.  The envelope is fixed (command,
lemma tag, verdict, seed, data, optional witness); the data payload is
command-specific.  JSON rendering is deterministic: sorted keys, fixed
separators, no locale-dependent formatting, so seeded runs are
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "triadeform check report",
    "type": "object",
    "properties": {
        "command": {"type": "string", "minLength": 1},
        "lemma": {"type": "string", "pattern": "^[A-Za-z0-9][A-Za-z0-9-]*$"},
        "ok": {"type": "boolean"},
        "seed": {"type": ["integer", "null"]},
        "data": {"type": "object"},
        "witness": {},
    },
    "required": ["command", "lemma", "ok", "data"],
    "additionalProperties": False,
}


@dataclass
class CheckReport:
    command: str
    lemma: str
    ok: bool
    data: dict = field(default_factory=dict)
    witness: Any = None
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {
            "command": self.command,
            "lemma": self.lemma,
            "ok": self.ok,
            "data": self.data,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(", ", ": "))

    def to_text(self) -> str:
        lines = [f"[{self.command}] lemma={self.lemma} ok={str(self.ok).lower()}"]
        if self.seed is not None:
            lines.append(f"  seed: {self.seed}")
        for key in sorted(self.data):
            lines.append(f"  {key}: {_plain(self.data[key])}")
        if self.witness is not None:
            lines.append(f"  witness: {_plain(self.witness)}")
        return "\n".join(lines)

    def render(self, output: str) -> str:
        return self.to_json() if output == "json" else self.to_text()


def _plain(value) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True, separators=(", ", ": "))
    if isinstance(value, bool):
        return str(value).lower()
    return str(value)
