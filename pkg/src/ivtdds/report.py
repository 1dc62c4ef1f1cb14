"""Versioned report envelope and its JSON / CSV / plain renderings."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from . import __version__

SCHEMA_VERSION = "1.0"
FORMATS = ("plain", "json", "csv")


def jsonable(obj: Any) -> Any:
    """Recursively convert payload values into JSON-safe, deterministic data."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return {"exact": f"{obj.numerator}/{obj.denominator}", "value": float(obj)}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, float):
        return round(obj, 12)
    return obj


@dataclass
class Report:
    command: list[str]
    config: dict
    payload: dict
    warnings: list[str] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)
    header: Optional[Sequence[str]] = None
    rows: list[Sequence] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "command": self.command,
            "config": jsonable(self.config),
            "payload": jsonable(self.payload),
            "warnings": list(self.warnings),
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if fmt == "csv":
            return self._csv()
        out = list(self.lines)
        out += [f"warning: {w}" for w in self.warnings]
        return "\n".join(out) + "\n"

    def _csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.header is not None:
            w.writerow(self.header)
            for row in self.rows:
                w.writerow(["" if v is None else v for v in row])
        else:
            w.writerow(["key", "value"])
            for k, v in sorted(_flatten(jsonable(self.payload)).items()):
                w.writerow([k, v])
        return buf.getvalue()


def _flatten(obj, prefix="") -> dict[str, Any]:
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    elif isinstance(obj, list):
        out[prefix[:-1]] = " ".join(map(str, obj))
    else:
        out[prefix[:-1]] = "" if obj is None else obj
    return out
