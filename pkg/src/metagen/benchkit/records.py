"""Task records and their JSONL form."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

from ..errors import IoFailure, MalformedLine

TASK_TYPES = ("reconstruction", "inverse_design", "material_understanding")
KEYS = ("task_type", "label", "source", "data", "query", "response")


@dataclass
class TaskRecord:
    task_type: str
    label: str
    source: str = None
    data: dict = None
    query: str = ""
    response: str = None

    def to_dict(self) -> dict:
        d = {"task_type": self.task_type, "label": self.label, "source": self.source,
             "data": self.data if self.data is not None else {}, "query": self.query}
        if self.response is not None:
            d["response"] = self.response
        return d


def record_from_dict(d: dict, line: int = 0) -> TaskRecord:
    if not isinstance(d, dict):
        raise MalformedLine(f"line {line}: expected a JSON object", line=line)
    extra = set(d) - set(KEYS)
    missing = {"task_type", "label", "query"} - set(d)
    if extra or missing:
        raise MalformedLine(f"line {line}: bad keys (missing {sorted(missing)}, "
                            f"unexpected {sorted(extra)})", line=line)
    if d["task_type"] not in TASK_TYPES:
        raise MalformedLine(f"line {line}: unknown task_type {d['task_type']!r}", line=line)
    return TaskRecord(d["task_type"], d["label"], d.get("source"), d.get("data", {}),
                      d["query"], d.get("response"))


def dumps(rec: TaskRecord) -> str:
    return json.dumps(rec.to_dict(), ensure_ascii=False, separators=(",", ":"))


def write_jsonl(records, path) -> None:
    try:
        with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
            for r in records:
                fh.write(dumps(r) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from None


def read_jsonl(path) -> list:
    out = []
    try:
        with open(os.fspath(path), encoding="utf-8") as fh:
            for i, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    d = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedLine(f"line {i}: {exc.msg}", line=i) from None
                out.append(record_from_dict(d, i))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from None
    return out
