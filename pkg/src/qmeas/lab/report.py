"""Scenario reports and their JSON, CSV and table renderings."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

DIGITS = 12


@dataclass
class Row:
    description: str
    expected: object
    actual: object
    tolerance: float = 0.0
    passed: bool = False

    def as_dict(self) -> dict:
        return {"description": self.description, "expected": self.expected,
                "actual": self.actual, "tolerance": self.tolerance, "pass": self.passed}


@dataclass
class Report:
    scenario: str
    config: dict
    seed: int
    rows: list[Row] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def check(self, description: str, expected, actual, tolerance: float = 0.0,
              passed: bool | None = None) -> Row:
        """Append a row; without ``passed`` it compares numbers within
        ``tolerance`` and anything else by equality."""
        if passed is None:
            passed = _agrees(expected, actual, tolerance)
        row = Row(description, expected, actual, float(tolerance), bool(passed))
        self.rows.append(row)
        return row

    def as_dict(self, timing: bool = False) -> dict:
        out = {"scenario": self.scenario, "config": self.config, "seed": self.seed,
               "rows": [r.as_dict() for r in self.rows], "pass": self.passed}
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _agrees(expected, actual, tol) -> bool:
    if isinstance(expected, (int, float, np.number)) and isinstance(actual, (int, float, np.number)) \
            and not isinstance(expected, bool):
        return abs(float(actual) - float(expected)) <= tol
    return expected == actual


def _plain(value):
    """Round floats to 12 significant digits and convert numpy scalars."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return str(v)
        v = float(f"{v:.{DIGITS}g}")
        return 0.0 if v == 0 else v
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    return value


def to_json(reports: list[Report], timing: bool = False) -> str:
    """One report renders as an object, several as an array."""
    body = [_plain(r.as_dict(timing)) for r in reports]
    return json.dumps(body[0] if len(body) == 1 else body, sort_keys=True, indent=2) + "\n"


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def to_csv(reports: list[Report], timing: bool = False) -> str:
    buf = io.StringIO()
    cols = ["scenario", "description", "expected", "actual", "tolerance", "pass"]
    if timing:
        cols.append("wall_time")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rep in reports:
        for row in rep.rows:
            line = [rep.scenario, row.description, _cell(row.expected), _cell(row.actual),
                    _cell(row.tolerance), "true" if row.passed else "false"]
            if timing:
                line.append(_cell(rep.wall_time))
            writer.writerow(line)
    return buf.getvalue()


def _short(value, width=22) -> str:
    text = _cell(value)
    return text if len(text) <= width else text[: width - 3] + "..."


def to_table(reports: list[Report], timing: bool = True) -> str:
    lines = []
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        head = f"== {rep.scenario}  [{status}]  seed={rep.seed}"
        if timing:
            head += f"  {rep.wall_time:.2f}s"
        lines.append(head)
        for row in rep.rows:
            mark = "ok " if row.passed else "BAD"
            lines.append(f"  {mark} {row.description:<58} expected={_short(row.expected):<22} "
                         f"actual={_short(row.actual):<22} tol={row.tolerance:.3g}")
    total = sum(len(r.rows) for r in reports)
    bad = sum(not row.passed for r in reports for row in r.rows)
    lines.append(f"{len(reports)} scenario(s), {total} check(s), {bad} failed")
    return "\n".join(lines) + "\n"


RENDERERS = {"json": to_json, "csv": to_csv, "table": to_table}
