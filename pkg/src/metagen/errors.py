"""Error hierarchy shared by every stage of the toolchain.

Each error may carry a source span so the CLI can print
``file:line:col: severity: message`` diagnostics.
"""
from __future__ import annotations


class MetagenError(Exception):
    """Base class. ``span`` is an optional (line, col) pair, 1-based."""

    code = "error"

    def __init__(self, message: str = "", span=None, **details):
        super().__init__(message)
        self.message = message
        self.span = span
        self.details = details

    def with_span(self, span):
        if self.span is None:
            self.span = span
        return self

    def format(self, filename: str = "<input>", severity: str = "error") -> str:
        line, col = self.span if self.span else (1, 1)
        return f"{filename}:{line}:{col}: {severity}: {type(self).__name__}: {self.message}"

    def __str__(self):
        return self.message


# frontend
class DSLSyntaxError(MetagenError):
    pass


class DSLNameError(MetagenError):
    pass


class DSLTypeError(MetagenError):
    pass


class MissingDefault(MetagenError):
    pass


class DepthLimit(MetagenError):
    pass


class StepLimit(MetagenError):
    pass


class EvaluationError(MetagenError):
    pass


# cp core
class UnknownEntity(MetagenError):
    def __init__(self, message="", suggestions=(), span=None):
        super().__init__(message, span=span, suggestions=list(suggestions))
        self.suggestions = list(suggestions)


class InterpolantArity(DSLTypeError):
    pass


class InterpolantRange(MetagenError):
    pass


class BarycentricOutOfSimplex(MetagenError):
    pass


class NotSimple(MetagenError):
    pass


class MixedPolytopes(MetagenError):
    pass


class TooShort(MetagenError):
    pass


class MixedDimensions(MetagenError):
    pass


class EmptySkeleton(MetagenError):
    pass


class IncompatibleLift(MetagenError):
    def __init__(self, message="", rule_violated="", span=None):
        super().__init__(message, span=span, rule_violated=rule_violated or message)
        self.rule_violated = rule_violated or message


# lifting
class NonPositiveThickness(MetagenError):
    pass


class ProfileNotIncreasing(MetagenError):
    pass


class ProfileRange(MetagenError):
    pass


class SolveDiverged(MetagenError):
    pass


class ConjugationBoundaryMismatch(MetagenError):
    pass


# assembly
class NotPowerOfTwoReciprocal(MetagenError):
    pass


class UnknownCorner(MetagenError):
    pass


class InvertedBox(MetagenError):
    pass


class IncompatiblePattern(MetagenError):
    pass


class UnsupportedCustomPolytope(MetagenError):
    pass


# discretize
class ResolutionRange(MetagenError):
    pass


class EmptyMesh(MetagenError):
    pass


class IoFailure(MetagenError):
    pass


# homogenize
class SolverNoConvergence(MetagenError):
    pass


class SingularSystem(MetagenError):
    pass


class IllConditioned(MetagenError):
    pass


class PreconditionError(MetagenError):
    pass


# augment / benchkit / metadb
class NoEligibleSites(MetagenError):
    def __init__(self, message="", gates=None, span=None):
        super().__init__(message, span=span)
        self.gates = gates


class EmitError(MetagenError):
    pass


class SplitError(MetagenError):
    pass


class SchemaError(MetagenError):
    pass


class HeaderError(MetagenError):
    pass


class TooFewModels(SplitError):
    pass


class MissingRenders(SchemaError):
    pass


class MissingProperties(SchemaError):
    pass


class MissingKey(SchemaError):
    pass


class BothEmpty(MetagenError):
    pass


class MalformedLine(SchemaError):
    def __init__(self, message="", line=None, span=None):
        super().__init__(message, span=span, line=line)
        self.line = line


class MalformedHeader(HeaderError):
    def __init__(self, message="", line=None, span=None):
        super().__init__(message, span=span, line=line)
        self.line = line


class PathEscape(MetagenError):
    pass


class NotFound(MetagenError):
    pass


class DuplicateId(MetagenError):
    pass


class MissingField(MetagenError):
    pass


class UnknownGenerator(MetagenError):
    pass
