"""Bundled example programs."""
from importlib import resources

NAMES = ("schwarz_p", "pentamode", "cube_frame", "bcc_nodes", "prism_curve",
         "floating_sphere", "solid")
REFERENCE = ("schwarz_p", "pentamode")  # the two reference programs
SEEDS = ("schwarz_p", "pentamode", "cube_frame", "bcc_nodes", "prism_curve")


def load(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.py").read_text(encoding="utf-8")
