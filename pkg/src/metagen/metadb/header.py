"""Header blocks: a triple-single-quoted YAML map at the top of a model file."""
from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from ..errors import MalformedHeader

DELIM = "'''"


@dataclass
class HeaderBlock:
    yaml_text: str = ""
    parsed: dict = field(default_factory=dict)

    @property
    def sources(self) -> dict:
        return self.parsed.get("sources") or {}

    @property
    def generator_info(self) -> dict:
        return (self.parsed.get("file_info") or {}).get("generator_info") or {}

    def __bool__(self):
        return bool(self.parsed)


def parse_header(text: str):
    """-> (HeaderBlock, body).  Without a header the block is empty and the
    body is the whole text."""
    stripped = text.lstrip()
    if not stripped.startswith(DELIM):
        return HeaderBlock(), text
    lead = len(text) - len(stripped)
    first_line = text.count("\n", 0, lead) + 1
    start = lead + len(DELIM)
    end = text.find(DELIM, start)
    if end < 0:
        raise MalformedHeader("unterminated header block (missing closing ''')",
                              span=(first_line, 1), line=first_line)
    yaml_text = text[start:end]
    try:
        parsed = yaml.safe_load(yaml_text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = first_line + (mark.line if mark is not None else 0)
        raise MalformedHeader(f"header is not valid YAML: {getattr(e, 'problem', e)}",
                              span=(line, 1), line=line) from None
    if parsed is None:
        parsed = {}
    if not isinstance(parsed, dict):
        raise MalformedHeader("header must be a YAML map", span=(first_line, 1), line=first_line)
    body = text[end + len(DELIM):]
    if body.startswith("\r\n"):
        body = body[2:]
    elif body.startswith("\n"):
        body = body[1:]
    return HeaderBlock(yaml_text, parsed), body


def dump_yaml(data: dict) -> str:
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=False, allow_unicode=True)


def write_header(h) -> str:
    """Serialize a HeaderBlock (or plain map) with sorted keys; empty -> ''."""
    data = h.parsed if isinstance(h, HeaderBlock) else dict(h or {})
    if not data:
        return ""
    text = dump_yaml(data)
    if DELIM in text:
        raise MalformedHeader("header values must not contain '''")
    return f"{DELIM}\n{text}{DELIM}\n"


def deep_merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def with_header(program_text: str, fragment: dict) -> str:
    """Merge a header fragment into a program's header and rewrite the file."""
    h, body = parse_header(program_text)
    return write_header(deep_merge(h.parsed, fragment)) + body
