"""MetaDSL lexer, parser and interpreter."""
from .interpreter import ParamSpec, evaluate, list_params
from .parser import parse_program


def compile_source(text: str, overrides=None):
    """parse + evaluate in one call."""
    return evaluate(parse_program(text), overrides)


__all__ = ["ParamSpec", "evaluate", "list_params", "parse_program", "compile_source"]
