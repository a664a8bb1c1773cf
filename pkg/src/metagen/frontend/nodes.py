"""AST node types.  ``span`` is (line, col) and is ignored by equality."""
from __future__ import annotations

from dataclasses import dataclass, field


def _span():
    return field(default=(1, 1), compare=False, repr=False)


@dataclass
class Num:
    value: float
    span: tuple = _span()


@dataclass
class Str:
    value: str
    span: tuple = _span()


@dataclass
class Const:
    value: object  # True / False / None
    span: tuple = _span()


@dataclass
class Name:
    id: str
    span: tuple = _span()


@dataclass
class Attribute:
    value: object
    attr: str
    span: tuple = _span()


@dataclass
class Subscript:
    value: object
    index: object
    span: tuple = _span()


@dataclass
class ListLit:
    items: list
    span: tuple = _span()


@dataclass
class Call:
    func: object
    args: list
    kwargs: list  # (name, expr)
    span: tuple = _span()


@dataclass
class BinOp:
    op: str
    left: object
    right: object
    span: tuple = _span()


@dataclass
class UnaryOp:
    op: str  # "-" | "+" | "not"
    operand: object
    span: tuple = _span()


@dataclass
class Compare:
    op: str
    left: object
    right: object
    span: tuple = _span()


@dataclass
class BoolOp:
    op: str  # "and" | "or"
    left: object
    right: object
    span: tuple = _span()


@dataclass
class Assign:
    targets: list  # Name | Subscript, several for tuple unpacking
    value: object
    op: str = "="
    span: tuple = _span()


@dataclass
class ExprStmt:
    value: object
    span: tuple = _span()


@dataclass
class Return:
    value: object
    span: tuple = _span()


@dataclass
class Pass:
    span: tuple = _span()


@dataclass
class For:
    target: str
    iter: object
    body: list
    span: tuple = _span()


@dataclass
class If:
    test: object
    body: list
    orelse: list
    span: tuple = _span()


@dataclass
class Param:
    name: str
    default: object  # expression or None
    span: tuple = _span()


@dataclass
class FunctionDef:
    name: str
    params: list
    body: list
    span: tuple = _span()


@dataclass
class ImportFrom:
    module: str
    names: list  # ["*"] or explicit names
    span: tuple = _span()


@dataclass
class Module:
    body: list
    header: str = field(default=None, compare=False)
    span: tuple = _span()

    def function(self, name: str):
        for s in self.body:
            if isinstance(s, FunctionDef) and s.name == name:
                return s
        return None
