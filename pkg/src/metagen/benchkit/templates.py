"""Query templates.  ``<[path]>`` marks an image reference."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

VIEW_ORDER = ("top", "front", "right", "angled")
VIEW_LABEL = {"top": "Top", "front": "Front", "right": "Right",
              "angled": "Angled (Front-Top-Right)"}
VIEW_SLOT = {"top": "{top}", "front": "{front}", "right": "{right}", "angled": "{top_right}"}


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    text = resources.files(__package__).joinpath(f"data/{name}.txt").read_text("utf-8")
    return text.rstrip("\n") + "\n"


def api_description() -> str:
    return load_template("api_description")


def system_prompt() -> str:
    return load_template("system_prompt").replace("{api_description}", api_description().rstrip("\n"))


def reconstruction_query(images: dict) -> str:
    """Keep only the view lines present in ``images`` (view -> path)."""
    out = []
    for line in load_template("reconstruction").splitlines():
        view = next((v for v in VIEW_ORDER if VIEW_SLOT[v] in line), None)
        if view is None:
            out.append(line)
        elif view in images:
            out.append(line.replace(VIEW_SLOT[view], images[view]))
    return "\n".join(out) + "\n"


def inverse_query(query_target: str) -> str:
    return load_template("inverse_design").replace("{query_target}", query_target)


def understanding_single_query(angled: str) -> str:
    return load_template("understanding_single").replace("{top_right}", angled)


def understanding_multi_query(code: str, images: dict) -> str:
    text = load_template("understanding_multi").replace("{code}", code.rstrip("\n"))
    for v in VIEW_ORDER:
        text = text.replace(VIEW_SLOT[v], images[v])
    return text
