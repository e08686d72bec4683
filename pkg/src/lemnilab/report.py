"""Deterministic, diffable run reports and CSV trajectory dumps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def fmt_float(x: float) -> str:
    """17 significant digits: round-trips every double exactly."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return f'"{x}"'
    return format(x, ".17g")


def _render(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}"{k}": {_render(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_render(v, indent + 1) for v in obj) + "]"
        items = [pad + _render(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    s = str(obj).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{s}"'


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    expected: float | None = None


@dataclass
class RunReport:
    """Key/value tree emitted by every CLI command.

    ``render()`` is byte-stable for identical inputs: no timestamps, fixed
    key order, 17-digit floats. The output is valid JSON.
    """

    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def add(self, key: str, value, source: str, label: str = ""):
        entry = {"value": value, "source": source}
        if label:
            entry["label"] = label
        self.results[key] = entry

    def check(self, name, value, limit, expected=None, passed=None) -> bool:
        if passed is None:
            passed = bool(abs(value) <= limit)
        self.checks.append(Check(name, float(value), float(limit), bool(passed), expected))
        return passed

    def check_close(self, name, value, expected, tol, relative=False) -> bool:
        err = abs(float(value) - float(expected))
        if relative and expected != 0:
            err /= abs(float(expected))
        return self.check(name, err, tol, expected=float(expected))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_tree(self) -> dict:
        checks = []
        for c in self.checks:
            d = {"name": c.name, "deviation": c.value, "limit": c.limit, "pass": c.passed}
            if c.expected is not None:
                d["expected"] = c.expected
            checks.append(d)
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "checks": checks,
            "summary": {
                "passed": sum(c.passed for c in self.checks),
                "failed": sum(not c.passed for c in self.checks),
                "status": "PASS" if self.passed else "FAIL",
            },
        }

    def render(self) -> str:
        return _render(self.to_tree(), 0) + "\n"


def trajectory_csv(t, pos, vel) -> str:
    """Columns t, x1, y1, ..., xn, yn, vx1, vy1, ..., vxn, vyn."""
    pos = np.asarray(pos)
    vel = np.asarray(vel)
    n = pos.shape[1]
    header = ["t"]
    header += [f"{c}{i}" for i in range(1, n + 1) for c in ("x", "y")]
    header += [f"{c}{i}" for i in range(1, n + 1) for c in ("vx", "vy")]
    lines = [",".join(header)]
    for k in range(len(t)):
        row = [t[k], *pos[k].ravel(), *vel[k].ravel()]
        lines.append(",".join(fmt_float(v) for v in row))
    return "\n".join(lines) + "\n"
