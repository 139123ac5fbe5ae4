"""Structured pass/fail/inconclusive reports shared by every check_* routine.

A report is a named list of items.  Each item has a status in
{"pass", "fail", "inconclusive"}; failures carry the witness that broke the
property so that a run can be reproduced bit-exactly from the seed.
"""
from __future__ import annotations

import json

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


class CheckItem:
    __slots__ = ("name", "status", "witness", "count", "note")

    def __init__(self, name, status, witness=None, count=None, note=None):
        self.name = name
        self.status = status
        self.witness = witness
        self.count = count
        self.note = note

    def __repr__(self):
        extra = ""
        if self.count is not None:
            extra += f" ({self.count} cases)"
        if self.status == FAIL and self.witness is not None:
            extra += f" witness={self.witness!r}"
        if self.note:
            extra += f" [{self.note}]"
        return f"{self.name}: {self.status}{extra}"


class CheckReport:
    """Collects named check results and aggregates an overall status."""

    def __init__(self, title: str):
        self.title = title
        self.items: list[CheckItem] = []

    def check(self, name, ok: bool, witness=None, count=None, note=None):
        status = PASS if ok else FAIL
        self.items.append(CheckItem(name, status, None if ok else witness,
                                    count, note))
        return ok

    def inconclusive(self, name, note):
        self.items.append(CheckItem(name, INCONCLUSIVE, note=note))

    @property
    def passed(self) -> bool:
        return all(item.status == PASS for item in self.items)

    @property
    def failed(self) -> bool:
        return any(item.status == FAIL for item in self.items)

    @property
    def status(self) -> str:
        if self.failed:
            return FAIL
        if any(item.status == INCONCLUSIVE for item in self.items):
            return INCONCLUSIVE
        return PASS

    def merge(self, other: "CheckReport"):
        for item in other.items:
            self.items.append(CheckItem(f"{other.title}/{item.name}",
                                        item.status, item.witness,
                                        item.count, item.note))
        return self

    def witness_for(self, name):
        for item in self.items:
            if item.name == name:
                return item.witness
        return None

    def __str__(self):
        lines = [f"== {self.title}: {self.status} =="]
        lines.extend(f"  {item!r}" for item in self.items)
        return "\n".join(lines)

    def render(self) -> str:
        return str(self)

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "status": self.status,
            "items": [
                {
                    "name": it.name,
                    "status": it.status,
                    "witness": repr(it.witness) if it.witness is not None else None,
                    "count": it.count,
                    "note": it.note,
                }
                for it in self.items
            ],
        }

    def json_str(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)
