"""Recursive-descent parser for the MetaDSL subset."""
from __future__ import annotations

from ..errors import DSLSyntaxError
from . import nodes as N
from .lexer import Token, tokenize

_UNSUPPORTED = {"while": "while-loops", "lambda": "lambda expressions", "class": "classes",
                "with": "with-blocks", "try": "exception handling", "yield": "generators",
                "global": "global declarations", "nonlocal": "nonlocal declarations",
                "del": "del statements", "assert": "assertions", "raise": "raise statements",
                "break": "break", "continue": "continue", "async": "async code",
                "await": "async code", "is": "identity comparison", "as": "aliases",
                "finally": "exception handling", "except": "exception handling"}
_AUG = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "//=": "//", "**=": "**"}
_CMP = {"<", ">", "==", "!=", "<=", ">="}


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # ------------------------------------------------------------ helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def at(self, kind, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "OP" and self.tok.value in ops

    def at_kw(self, *kws) -> bool:
        return self.tok.kind == "KEYWORD" and self.tok.value in kws

    def error(self, expected: str, tok: Token = None):
        tok = tok or self.tok
        found = {"NEWLINE": "end of line", "EOF": "end of input", "INDENT": "indent",
                 "DEDENT": "dedent"}.get(tok.kind, repr(tok.value))
        raise DSLSyntaxError(f"expected {expected}, found {found}", span=tok.span,
                             expected=expected)

    def expect_op(self, op) -> Token:
        if not self.at_op(op):
            self.error(f"'{op}'")
        return self.advance()

    def expect_kw(self, kw) -> Token:
        if not self.at_kw(kw):
            self.error(f"'{kw}'")
        return self.advance()

    def expect_name(self) -> Token:
        if not self.at("NAME"):
            self.error("an identifier")
        return self.advance()

    def expect_newline(self):
        if self.at_op(";"):
            self.error("end of line (multiple statements per line are not supported)")
        if not (self.at("NEWLINE") or self.at("EOF")):
            self.error("end of line")
        if self.at("NEWLINE"):
            self.advance()

    def unsupported(self):
        t = self.tok
        if t.kind == "KEYWORD" and t.value in _UNSUPPORTED:
            raise DSLSyntaxError(f"unsupported construct: {_UNSUPPORTED[t.value]}",
                                 span=t.span, expected="a supported statement")

    # --------------------------------------------------------- statements
    def parse_module(self) -> N.Module:
        body = []
        header = None
        while self.at("NEWLINE"):
            self.advance()
        if self.at("STRING") and self.peek().kind in ("NEWLINE", "EOF"):
            header = self.tok.value
        while not self.at("EOF"):
            if self.at("NEWLINE"):
                self.advance()
                continue
            if self.at("INDENT"):
                self.error("a statement (unexpected indent)")
            body.append(self.statement())
        mod = N.Module(body, header, (1, 1))
        if mod.function("make_structure") is None:
            raise DSLSyntaxError("the program must define make_structure()",
                                 span=self.tok.span if body else (1, 1),
                                 expected="def make_structure(...)")
        return mod

    def block(self) -> list:
        self.expect_op(":")
        if not self.at("NEWLINE"):
            stmt = self.simple_statement()
            return [stmt]
        self.advance()
        if not self.at("INDENT"):
            self.error("an indented block")
        self.advance()
        body = []
        while not self.at("DEDENT") and not self.at("EOF"):
            if self.at("NEWLINE"):
                self.advance()
                continue
            body.append(self.statement())
        if self.at("DEDENT"):
            self.advance()
        return body

    def statement(self):
        self.unsupported()
        t = self.tok
        if self.at_kw("def"):
            return self.funcdef()
        if self.at_kw("for"):
            self.advance()
            target = self.expect_name().value
            self.expect_kw("in")
            it = self.expr()
            return N.For(target, it, self.block(), t.span)
        if self.at_kw("if"):
            return self.if_stmt()
        if self.at_kw("from"):
            self.advance()
            mod = self.expect_name()
            if mod.value != "metagen":
                raise DSLSyntaxError(f"only 'from metagen import ...' is supported, not "
                                     f"'{mod.value}'", span=mod.span, expected="metagen")
            self.expect_kw("import")
            names = []
            if self.at_op("*"):
                self.advance()
                names = ["*"]
            else:
                names.append(self.expect_name().value)
                while self.at_op(","):
                    self.advance()
                    names.append(self.expect_name().value)
            self.expect_newline()
            return N.ImportFrom("metagen", names, t.span)
        if self.at_kw("import"):
            raise DSLSyntaxError("imports other than 'from metagen import *' are not supported",
                                 span=t.span, expected="from metagen import *")
        stmt = self.simple_statement()
        return stmt

    def simple_statement(self):
        self.unsupported()
        t = self.tok
        if self.at_kw("return"):
            self.advance()
            val = None if (self.at("NEWLINE") or self.at("EOF")) else self.expr()
            self.expect_newline()
            return N.Return(val, t.span)
        if self.at_kw("pass"):
            self.advance()
            self.expect_newline()
            return N.Pass(t.span)
        first = self.expr()
        targets = [first]
        while self.at_op(","):
            self.advance()
            targets.append(self.expr())
        if self.at_op("=") or (self.tok.kind == "OP" and self.tok.value in _AUG):
            op = self.advance().value
            for tg in targets:
                if not isinstance(tg, (N.Name, N.Subscript)):
                    raise DSLSyntaxError("cannot assign to this expression", span=tg.span,
                                         expected="a name or subscript")
            if op != "=" and len(targets) != 1:
                raise DSLSyntaxError("augmented assignment needs a single target", span=t.span,
                                     expected="a single target")
            value = self.expr()
            if self.at_op(","):
                items = [value]
                while self.at_op(","):
                    self.advance()
                    items.append(self.expr())
                value = N.ListLit(items, value.span)
            if self.at_op("="):
                self.error("end of line (chained assignment is not supported)")
            self.expect_newline()
            return N.Assign(targets, value, _AUG.get(op, "="), t.span)
        if len(targets) > 1:
            self.error("'='")
        self.expect_newline()
        return N.ExprStmt(first, t.span)

    def funcdef(self):
        t = self.expect_kw("def")
        name = self.expect_name().value
        self.expect_op("(")
        params = []
        while not self.at_op(")"):
            if self.at_op("*", "**"):
                self.error("a named parameter (variadic parameters are not supported)")
            p = self.expect_name()
            if self.at_op(":"):
                self.advance()
                self.expr()  # annotation, ignored
            default = None
            if self.at_op("="):
                self.advance()
                default = self.expr()
            params.append(N.Param(p.value, default, p.span))
            if not self.at_op(","):
                break
            self.advance()
        self.expect_op(")")
        if self.at_op("->"):
            self.advance()
            self.expr()  # return annotation, ignored
        return N.FunctionDef(name, params, self.block(), t.span)

    def if_stmt(self):
        t = self.advance()
        test = self.expr()
        body = self.block()
        orelse = []
        if self.at_kw("elif"):
            orelse = [self.if_stmt()]
        elif self.at_kw("else"):
            self.advance()
            orelse = self.block()
        return N.If(test, body, orelse, t.span)

    # -------------------------------------------------------- expressions
    def expr(self):
        if self.at_kw("lambda"):
            self.unsupported()
        node = self.or_expr()
        if self.at_kw("if"):
            self.error("end of expression (conditional expressions are not supported)")
        return node

    def or_expr(self):
        left = self.and_expr()
        while self.at_kw("or"):
            t = self.advance()
            left = N.BoolOp("or", left, self.and_expr(), t.span)
        return left

    def and_expr(self):
        left = self.not_expr()
        while self.at_kw("and"):
            t = self.advance()
            left = N.BoolOp("and", left, self.not_expr(), t.span)
        return left

    def not_expr(self):
        if self.at_kw("not"):
            t = self.advance()
            return N.UnaryOp("not", self.not_expr(), t.span)
        return self.comparison()

    def comparison(self):
        left = self.arith()
        if self.tok.kind == "OP" and self.tok.value in _CMP:
            t = self.advance()
            right = self.arith()
            if self.tok.kind == "OP" and self.tok.value in _CMP:
                self.error("end of comparison (chained comparisons are not supported)")
            return N.Compare(t.value, left, right, t.span)
        if self.at_kw("in") or self.at_kw("not") and self.peek().value == "in":
            self.error("an operator ('in' tests are not supported)")
        return left

    def arith(self):
        left = self.term()
        while self.at_op("+", "-"):
            t = self.advance()
            left = N.BinOp(t.value, left, self.term(), t.span)
        return left

    def term(self):
        left = self.unary()
        while self.at_op("*", "/", "//", "%"):
            t = self.advance()
            left = N.BinOp(t.value, left, self.unary(), t.span)
        return left

    def unary(self):
        if self.at_op("-", "+"):
            t = self.advance()
            return N.UnaryOp(t.value, self.unary(), t.span)
        return self.power()

    def power(self):
        base = self.postfix()
        if self.at_op("**"):
            t = self.advance()
            return N.BinOp("**", base, self.unary(), t.span)
        return base

    def postfix(self):
        node = self.atom()
        while True:
            if self.at_op("."):
                t = self.advance()
                name = self.expect_name()
                node = N.Attribute(node, name.value, name.span)
            elif self.at_op("("):
                t = self.advance()
                args, kwargs = [], []
                while not self.at_op(")"):
                    if self.at_op("*", "**"):
                        self.error("an argument (argument unpacking is not supported)")
                    if self.at("NAME") and self.peek().kind == "OP" and self.peek().value == "=":
                        k = self.advance().value
                        self.advance()
                        if any(k == kk for kk, _ in kwargs):
                            raise DSLSyntaxError(f"keyword argument '{k}' repeated",
                                                 span=self.tok.span, expected="a new keyword")
                        kwargs.append((k, self.expr()))
                    else:
                        if kwargs:
                            self.error("a keyword argument (positional after keyword)")
                        args.append(self.expr())
                    if not self.at_op(","):
                        break
                    self.advance()
                self.expect_op(")")
                node = N.Call(node, args, kwargs, getattr(node, "span", t.span))
            elif self.at_op("["):
                t = self.advance()
                if self.at_op(":"):
                    self.error("an index (slices are not supported)")
                idx = self.expr()
                if self.at_op(":"):
                    self.error("']' (slices are not supported)")
                self.expect_op("]")
                node = N.Subscript(node, idx, t.span)
            else:
                return node

    def atom(self):
        t = self.tok
        if t.kind == "NUMBER":
            self.advance()
            return N.Num(t.value, t.span)
        if t.kind == "STRING":
            self.advance()
            s = t.value
            while self.at("STRING"):
                s += self.advance().value
            return N.Str(s, t.span)
        if t.kind == "NAME":
            self.advance()
            return N.Name(t.value, t.span)
        if t.kind == "KEYWORD" and t.value in ("True", "False", "None"):
            self.advance()
            return N.Const({"True": True, "False": False, "None": None}[t.value], t.span)
        if self.at_op("["):
            self.advance()
            items = []
            while not self.at_op("]"):
                items.append(self.expr())
                if self.at_kw("for"):
                    self.error("']' (comprehensions are not supported)")
                if not self.at_op(","):
                    break
                self.advance()
            self.expect_op("]")
            return N.ListLit(items, t.span)
        if self.at_op("("):
            self.advance()
            first = self.expr()
            if self.at_kw("for"):
                self.error("')' (generator expressions are not supported)")
            if self.at_op(","):
                items = [first]
                while self.at_op(","):
                    self.advance()
                    if self.at_op(")"):
                        break
                    items.append(self.expr())
                self.expect_op(")")
                return N.ListLit(items, t.span)
            self.expect_op(")")
            return first
        if self.at_op("{"):
            self.error("an expression (dicts and sets are not supported)")
        self.unsupported()
        self.error("an expression")


def parse_program(text: str) -> N.Module:
    """Parse MetaDSL source into a Module AST (header block kept as ``header``)."""
    if not isinstance(text, str):
        raise DSLSyntaxError("program text must be a string", span=(1, 1), expected="text")
    return Parser(text).parse_module()
