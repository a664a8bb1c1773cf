"""Tree-walking evaluator for MetaDSL programs."""
from __future__ import annotations

import math
import operator
import sys
from dataclasses import dataclass

from ..assembly import Csg, Leaf
from ..errors import (DepthLimit, DSLNameError, DSLTypeError, EvaluationError, MetagenError,
                      MissingDefault, StepLimit)
from . import nodes as N
from .builtins import Builtin, CPNamespace, EntityNamespace, make_namespace, type_name

MAX_STEPS = 1_000_000
MAX_DEPTH = 64

_BIN = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv,
        "//": operator.floordiv, "%": operator.mod, "**": operator.pow}
_CMP = {"<": operator.lt, ">": operator.gt, "<=": operator.le, ">=": operator.ge,
        "==": operator.eq, "!=": operator.ne}


@dataclass(frozen=True)
class ParamSpec:
    name: str
    default: float
    declared_order: int


def _const_value(expr):
    """Evaluate a parameter default: a (signed) number or simple arithmetic of numbers."""
    if isinstance(expr, N.Num):
        return expr.value
    if isinstance(expr, N.UnaryOp) and expr.op in "+-":
        v = _const_value(expr.operand)
        return -v if expr.op == "-" else v
    if isinstance(expr, N.BinOp):
        try:
            return float(_BIN[expr.op](_const_value(expr.left), _const_value(expr.right)))
        except ZeroDivisionError:
            raise DSLTypeError("parameter default divides by zero", span=expr.span) from None
    raise DSLTypeError("parameter defaults must be numbers", span=getattr(expr, "span", None))


def list_params(ast: N.Module) -> list:
    fn = ast.function("make_structure")
    if fn is None:
        raise DSLNameError("the program does not define make_structure()", span=(1, 1))
    out = []
    names = set()
    for i, p in enumerate(fn.params):
        if p.default is None:
            raise MissingDefault(f"parameter '{p.name}' of make_structure has no default value",
                                 span=p.span)
        if p.name in names:
            raise DSLNameError(f"parameter '{p.name}' declared twice", span=p.span)
        names.add(p.name)
        v = float(_const_value(p.default))
        if not math.isfinite(v):
            raise DSLTypeError(f"default of '{p.name}' is not finite", span=p.span)
        out.append(ParamSpec(p.name, v, i))
    return out


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class Function:
    def __init__(self, node: N.FunctionDef, env: "Env"):
        self.node = node
        self.env = env
        self.defaults = {}

    def __repr__(self):
        return f"<function {self.node.name}>"


class Env:
    def __init__(self, parent=None):
        self.vars: dict = {}
        self.parent = parent

    def lookup(self, name, span):
        e = self
        while e is not None:
            if name in e.vars:
                return e.vars[name]
            e = e.parent
        raise DSLNameError(f"name '{name}' is not defined", span=span)


class Interpreter:
    def __init__(self, max_steps: int = MAX_STEPS, max_depth: int = MAX_DEPTH):
        self.max_steps = max_steps
        self.max_depth = max_depth
        self.steps = 0
        self.depth = 0

    def tick(self, span):
        self.steps += 1
        if self.steps > self.max_steps:
            raise StepLimit(f"evaluation exceeded {self.max_steps} steps", span=span)

    # ------------------------------------------------------------ entry
    def run(self, ast: N.Module, overrides=None):
        params = list_params(ast)
        overrides = dict(overrides or {})
        known = {p.name for p in params}
        for k in overrides:
            if k not in known:
                raise DSLNameError(f"make_structure has no parameter '{k}'", span=(1, 1))
        builtins = Env()
        builtins.vars.update(make_namespace())
        glob = Env(builtins)
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 40 * self.max_depth + 2000))
        try:
            self.exec_block(ast.body, glob)
            fn = glob.lookup("make_structure", (1, 1))
            args = {p.name: float(overrides.get(p.name, p.default)) for p in params}
            result = self.call_function(fn, [], list(args.items()), fn.node.span)
        finally:
            sys.setrecursionlimit(old)
        if not isinstance(result, (Leaf, Csg)):
            raise DSLTypeError(f"make_structure must return a Structure, got {type_name(result)}",
                               span=fn.node.span)
        return result

    # ------------------------------------------------------- statements
    def exec_block(self, body, env):
        for s in body:
            self.exec_stmt(s, env)

    def exec_stmt(self, s, env):
        self.tick(s.span)
        if isinstance(s, N.Assign):
            value = self.eval(s.value, env)
            if len(s.targets) > 1:
                if not isinstance(value, list) or len(value) != len(s.targets):
                    raise DSLTypeError(f"cannot unpack {type_name(value)} into "
                                       f"{len(s.targets)} names", span=s.span)
                for t, v in zip(s.targets, value):
                    self.assign(t, v, env)
                return
            if s.op != "=":
                value = self.binop(s.op, self.eval(s.targets[0], env), value, s.span)
            self.assign(s.targets[0], value, env)
        elif isinstance(s, N.ExprStmt):
            self.eval(s.value, env)
        elif isinstance(s, N.Return):
            raise _Return(None if s.value is None else self.eval(s.value, env))
        elif isinstance(s, N.FunctionDef):
            env.vars[s.name] = Function(s, env)
            for p in s.params:
                if p.default is not None:
                    env.vars[s.name].defaults[p.name] = self.eval(p.default, env)
        elif isinstance(s, N.For):
            seq = self.eval(s.iter, env)
            if not isinstance(seq, list):
                raise DSLTypeError(f"for-loops iterate over lists or range(), got "
                                   f"{type_name(seq)}", span=s.iter.span)
            for item in list(seq):
                env.vars[s.target] = item
                self.exec_block(s.body, env)
        elif isinstance(s, N.If):
            if self.truth(self.eval(s.test, env), s.test.span):
                self.exec_block(s.body, env)
            else:
                self.exec_block(s.orelse, env)
        elif isinstance(s, (N.Pass, N.ImportFrom)):
            pass
        else:  # pragma: no cover - parser produces only the nodes above
            raise EvaluationError(f"cannot execute {type(s).__name__}", span=s.span)

    def assign(self, target, value, env):
        if isinstance(target, N.Name):
            env.vars[target.id] = value
            return
        seq = self.eval(target.value, env)
        if not isinstance(seq, list):
            raise DSLTypeError(f"cannot assign into {type_name(seq)}", span=target.span)
        seq[self.index(seq, self.eval(target.index, env), target.span)] = value

    # ------------------------------------------------------ expressions
    def truth(self, v, span):
        if isinstance(v, (bool, int, float, list, str)) or v is None:
            return bool(v)
        raise DSLTypeError(f"a {type_name(v)} cannot be used as a condition", span=span)

    def index(self, seq, i, span):
        if isinstance(i, bool) or not isinstance(i, (int, float)) or i != int(i):
            raise DSLTypeError(f"list indices must be whole numbers, got {type_name(i)}",
                               span=span)
        i = int(i)
        if not -len(seq) <= i < len(seq):
            raise EvaluationError(f"index {i} out of range for a list of length {len(seq)}",
                                  span=span)
        return i

    def binop(self, op, a, b, span):
        num = (int, float)
        ok = ((isinstance(a, num) and isinstance(b, num))
              or (op == "+" and isinstance(a, list) and isinstance(b, list))
              or (op == "+" and isinstance(a, str) and isinstance(b, str))
              or (op == "*" and isinstance(a, list) and isinstance(b, num) and b == int(b))
              or (op == "*" and isinstance(b, list) and isinstance(a, num) and a == int(a)))
        if not ok:
            raise DSLTypeError(f"unsupported operand types for {op}: {type_name(a)} and "
                               f"{type_name(b)}", span=span)
        if op == "*" and (isinstance(a, list) or isinstance(b, list)):
            return a * int(b) if isinstance(a, list) else b * int(a)
        try:
            r = _BIN[op](a, b)
        except ZeroDivisionError:
            raise EvaluationError("division by zero", span=span) from None
        except OverflowError:
            raise EvaluationError("numeric overflow", span=span) from None
        if isinstance(r, complex):
            raise EvaluationError("result is not a real number", span=span)
        return float(r) if isinstance(r, (int, float)) and not isinstance(r, bool) else r

    def eval(self, e, env):
        self.tick(e.span)
        if isinstance(e, N.Num):
            return float(e.value)
        if isinstance(e, (N.Str, N.Const)):
            return e.value
        if isinstance(e, N.Name):
            return env.lookup(e.id, e.span)
        if isinstance(e, N.ListLit):
            return [self.eval(x, env) for x in e.items]
        if isinstance(e, N.Attribute):
            obj = self.eval(e.value, env)
            if isinstance(obj, (CPNamespace, EntityNamespace)):
                try:
                    return obj.dsl_attr(e.attr)
                except MetagenError as err:
                    raise err.with_span(e.span)
            raise DSLTypeError(f"{type_name(obj)} has no attribute '{e.attr}'", span=e.span)
        if isinstance(e, N.Subscript):
            seq = self.eval(e.value, env)
            if not isinstance(seq, list):
                raise DSLTypeError(f"{type_name(seq)} is not indexable", span=e.span)
            return seq[self.index(seq, self.eval(e.index, env), e.span)]
        if isinstance(e, N.BinOp):
            return self.binop(e.op, self.eval(e.left, env), self.eval(e.right, env), e.span)
        if isinstance(e, N.UnaryOp):
            v = self.eval(e.operand, env)
            if e.op == "not":
                return not self.truth(v, e.span)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise DSLTypeError(f"bad operand type for unary {e.op}: {type_name(v)}",
                                   span=e.span)
            return -float(v) if e.op == "-" else float(v)
        if isinstance(e, N.Compare):
            a, b = self.eval(e.left, env), self.eval(e.right, env)
            if e.op in ("==", "!="):
                return _CMP[e.op](a, b)
            if not (isinstance(a, (int, float)) and isinstance(b, (int, float))):
                raise DSLTypeError(f"cannot compare {type_name(a)} and {type_name(b)}",
                                   span=e.span)
            return _CMP[e.op](a, b)
        if isinstance(e, N.BoolOp):
            a = self.eval(e.left, env)
            if e.op == "and":
                return self.eval(e.right, env) if self.truth(a, e.span) else a
            return a if self.truth(a, e.span) else self.eval(e.right, env)
        if isinstance(e, N.Call):
            fn = self.eval(e.func, env)
            args = [self.eval(a, env) for a in e.args]
            kwargs = [(k, self.eval(v, env)) for k, v in e.kwargs]
            return self.call(fn, args, kwargs, e.span)
        raise EvaluationError(f"cannot evaluate {type(e).__name__}", span=e.span)

    def call(self, fn, args, kwargs, span):
        if isinstance(fn, Builtin):
            try:
                return fn(args, dict(kwargs))
            except MetagenError as err:
                raise err.with_span(span)
            except (TypeError, ValueError, ArithmeticError) as err:
                raise DSLTypeError(f"{fn.name}(): {err}", span=span) from None
        if isinstance(fn, Function):
            return self.call_function(fn, args, kwargs, span)
        raise DSLTypeError(f"{type_name(fn)} is not callable", span=span)

    def call_function(self, fn: Function, args, kwargs, span):
        node = fn.node
        names = [p.name for p in node.params]
        if len(args) > len(names):
            raise DSLTypeError(f"{node.name}() takes {len(names)} arguments, got {len(args)}",
                               span=span)
        local = Env(fn.env)
        bound = dict(zip(names, args))
        for k, v in kwargs:
            if k not in names:
                raise DSLTypeError(f"{node.name}() got an unexpected keyword argument '{k}'",
                                   span=span)
            if k in bound:
                raise DSLTypeError(f"{node.name}() got multiple values for '{k}'", span=span)
            bound[k] = v
        for n in names:
            if n not in bound:
                if n not in fn.defaults:
                    raise DSLTypeError(f"{node.name}() missing argument '{n}'", span=span)
                bound[n] = fn.defaults[n]
        local.vars.update(bound)
        self.depth += 1
        if self.depth > self.max_depth:
            self.depth -= 1
            raise DepthLimit(f"call depth exceeded {self.max_depth}", span=span)
        try:
            self.exec_block(node.body, local)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        return None


def evaluate(ast: N.Module, overrides=None, max_steps: int = MAX_STEPS,
             max_depth: int = MAX_DEPTH):
    """Run make_structure with defaults (optionally overridden); return the StructureIR."""
    return Interpreter(max_steps, max_depth).run(ast, overrides)
