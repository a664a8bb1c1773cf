"""Mutation, program emission and hybridization prompts."""
from .emit import emit_program, fmt_num
from .hybrid import build_hybrid_prompt, extract_code_block, run_hook
from .mutate import AXES, MutationConfig, MutationTrace, derive_seed, mutate

__all__ = ["emit_program", "fmt_num", "build_hybrid_prompt", "extract_code_block", "run_hook",
           "AXES", "MutationConfig", "MutationTrace", "derive_seed", "mutate"]
