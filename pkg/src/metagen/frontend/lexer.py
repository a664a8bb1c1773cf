"""Tokenizer for the MetaDSL surface syntax (an indentation-based Python subset)."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import DSLSyntaxError

KEYWORDS = {"def", "return", "for", "in", "if", "elif", "else", "from", "import", "pass",
            "and", "or", "not", "True", "False", "None", "while", "lambda", "class",
            "with", "try", "except", "yield", "global", "nonlocal", "del", "assert",
            "break", "continue", "raise", "is", "async", "await", "finally", "as"}

_OPS = ["**=", "//=", "->", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
        "+", "-", "*", "/", "%", "<", ">", "=", "(", ")", "[", "]", "{", "}", ",", ":",
        ".", ";", "@"]

_NUMBER = re.compile(r"(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str  # NAME NUMBER STRING OP KEYWORD NEWLINE INDENT DEDENT EOF
    value: object
    line: int
    col: int

    @property
    def span(self):
        return (self.line, self.col)


def tokenize(text: str) -> list:
    toks: list = []
    indents = [0]
    depth = 0  # bracket nesting; newlines inside brackets are ignored
    i, line, col = 0, 1, 1
    n = len(text)
    at_line_start = True

    def err(msg, ln=None, c=None):
        raise DSLSyntaxError(msg, span=(ln or line, c or col))

    while i < n:
        if at_line_start and depth == 0:
            # measure indentation; skip blank and comment-only lines
            j, width = i, 0
            while j < n and text[j] in " \t":
                width += 4 if text[j] == "\t" else 1
                j += 1
            if j >= n:
                i = j
                break
            if text[j] in "\r\n#":
                while j < n and text[j] != "\n":
                    j += 1
                i = j + 1
                line += 1
                col = 1
                continue
            col = 1 + (j - i)
            i = j
            if width > indents[-1]:
                indents.append(width)
                toks.append(Token("INDENT", width, line, col))
            else:
                while width < indents[-1]:
                    indents.pop()
                    toks.append(Token("DEDENT", width, line, col))
                if width != indents[-1]:
                    err("unindent does not match any outer indentation level")
            at_line_start = False
        c = text[i]
        if c == "\n":
            if depth == 0:
                toks.append(Token("NEWLINE", None, line, col))
                at_line_start = True
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == "\\" and i + 1 < n and text[i + 1] == "\n":
            i += 2
            line += 1
            col = 1
            continue
        if text.startswith("'''", i) or text.startswith('"""', i):
            q = text[i:i + 3]
            end = text.find(q, i + 3)
            if end < 0:
                err("unterminated triple-quoted string")
            body = text[i + 3:end]
            toks.append(Token("STRING", body, line, col))
            nl = body.count("\n") + q.count("\n")
            if nl:
                line += nl
                col = len(text[i:end + 3]) - text[i:end + 3].rfind("\n")
            else:
                col += end + 3 - i
            i = end + 3
            continue
        if c in "'\"":
            j = i + 1
            buf = []
            while j < n and text[j] != c:
                if text[j] == "\n":
                    err("unterminated string literal")
                if text[j] == "\\" and j + 1 < n:
                    buf.append({"n": "\n", "t": "\t"}.get(text[j + 1], text[j + 1]))
                    j += 2
                    continue
                buf.append(text[j])
                j += 1
            if j >= n:
                err("unterminated string literal")
            toks.append(Token("STRING", "".join(buf), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m and (c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit())):
            s = m.group(0)
            toks.append(Token("NUMBER", float(s), line, col))
            i += len(s)
            col += len(s)
            continue
        m = _NAME.match(text, i)
        if m:
            s = m.group(0)
            toks.append(Token("KEYWORD" if s in KEYWORDS else "NAME", s, line, col))
            i += len(s)
            col += len(s)
            continue
        for op in _OPS:
            if text.startswith(op, i):
                if op in "([{":
                    depth += 1
                elif op in ")]}":
                    depth = max(0, depth - 1)
                toks.append(Token("OP", op, line, col))
                i += len(op)
                col += len(op)
                break
        else:
            err(f"unexpected character {c!r}")
    if toks and toks[-1].kind not in ("NEWLINE", "INDENT", "DEDENT"):
        toks.append(Token("NEWLINE", None, line, col))
    while len(indents) > 1:
        indents.pop()
        toks.append(Token("DEDENT", 0, line, col))
    toks.append(Token("EOF", None, line, col))
    return toks
