"""Check results and deterministic report serialization."""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import fmt


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: object = None
    detail: object = None

    def __bool__(self):
        return bool(self.passed)

    def as_dict(self):
        out = {"name": self.name, "passed": bool(self.passed)}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.detail is not None:
            out["detail"] = jsonable(self.detail)
        return out


def all_passed(results):
    return all(r.passed for r in results)


def key_str(k):
    """Readable, stable string for nested tuple keys."""
    if isinstance(k, tuple):
        return "(" + ",".join(key_str(x) for x in k) + ")"
    if isinstance(k, Fraction):
        return fmt(k)
    return str(k)


def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, CheckResult):
        return obj.as_dict()
    if isinstance(obj, dict):
        return {key_str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(x) for x in obj)
    return str(obj)


@dataclass
class Report:
    command: list
    digest: str = ""
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    timing: float = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, result):
        if isinstance(result, (list, tuple)):
            self.checks.extend(result)
        else:
            self.checks.append(result)

    def as_dict(self, with_timing=False):
        out = {
            "command": list(self.command),
            "input_digest": self.digest,
            "checks": [c.as_dict() for c in self.checks],
            "data": jsonable(self.data),
            "bounds": jsonable(self.bounds),
            "passed": self.passed,
        }
        if with_timing and self.timing is not None:
            out["timing_seconds"] = round(self.timing, 3)
        return out

    def to_machine(self, with_timing=False):
        return dumps(self.as_dict(with_timing))

    def to_text(self):
        lines = [f"$ {' '.join(self.command)}"]
        if self.digest:
            lines.append(f"input sha256 {self.digest}")
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"[{mark}] {c.name}")
            if c.detail is not None:
                lines.append(f"       {_flat(c.detail)}")
            if c.witness is not None:
                lines.append(f"       witness: {_flat(c.witness)}")
        for k in sorted(self.data):
            lines.append(f"{k}: {_flat(self.data[k])}")
        if self.bounds:
            lines.append("bounds: " + _flat(self.bounds))
        if self.timing is not None:
            lines.append(f"time: {self.timing:.2f}s")
        lines.append("result: " + ("pass" if self.passed else "fail"))
        return "\n".join(lines) + "\n"


def _flat(obj):
    return json.dumps(jsonable(obj), sort_keys=True, ensure_ascii=False)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def roundtrip(text):
    """Parse a machine report and serialize it again."""
    return dumps(json.loads(text))
