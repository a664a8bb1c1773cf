"""Crossover prompt assembly for model-driven hybridization."""
from __future__ import annotations

import subprocess

from ..errors import MetagenError

_HEAD = """You have access to a DSL whose specification is as follows:
{api_description}

I want you to help discover unique new programs. Do this by genetic crossover based on these parent Metagen DSL programs:
"""

_TAIL = """

Combine relevant structural/logical features from each sample into one coherent DSL program.
Be sure to:
- Respect the DSL syntax strictly. 
- Maintain correctness in the final structure definition.
- Keep the final program well-formed and ready to be run as a standard Metagen DSL generator.
- Provide minimal descriptive comments.

Return only the resulting code in a single code block.
"""


def build_hybrid_prompt(parent_a: str, parent_b: str, api_description: str, *more: str) -> str:
    """Fill the crossover template; extra parents (for triplets) follow in order."""
    parents = [parent_a, parent_b, *more]
    blocks = []
    for i, code in enumerate(parents, 1):
        blocks.append(f"\n{i})\n```python\n{code.strip(chr(10))}\n```\n")
    return _HEAD.format(api_description=api_description.strip("\n")) + "".join(blocks) + _TAIL


def run_hook(command: list, prompt: str, timeout: float = 600.0) -> str:
    """Send ``prompt`` on stdin to a user-configured executable; return its stdout."""
    try:
        res = subprocess.run(command, input=prompt, capture_output=True, text=True,
                             timeout=timeout, check=False)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise MetagenError(f"hybridization hook failed: {exc}") from None
    if res.returncode != 0:
        raise MetagenError(f"hybridization hook exited with {res.returncode}: {res.stderr.strip()}")
    return res.stdout


def extract_code_block(text: str) -> str:
    """Body of the first fenced code block, or the text itself."""
    start = text.find("```")
    if start < 0:
        return text
    nl = text.find("\n", start)
    end = text.find("```", nl + 1)
    return text[nl + 1:end if end >= 0 else len(text)]
