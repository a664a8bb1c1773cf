"""Per-property reference entries: names, families and target descriptors.

Each descriptor is (part of speech, phrase, target type, target value).
Bounds are strict: an upper bound b is met by x < b, a lower bound by x > b,
a range [a, b] by a <= x <= b.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

OVERALL, DIRECTIONAL = "overall", "directional"
UPPER, LOWER, RANGE, VALUE = "upper_bound", "lower_bound", "range", "value"

FAMILIES = {
    "E": ("E_1", "E_2", "E_3"),
    "G": ("G_23", "G_13", "G_12"),
    "nu": ("nu_12", "nu_13", "nu_23", "nu_21", "nu_31", "nu_32"),
}
FAMILY_OF = {d: f for f, ds in FAMILIES.items() for d in ds}
PROPERTIES = ("E", "E_1", "E_2", "E_3", "G", "G_23", "G_13", "G_12", "nu", "nu_12", "nu_13",
              "nu_23", "nu_21", "nu_31", "nu_32", "K", "A", "V")
ANISOTROPY_THRESHOLD = 0.0025

AXIS = {"1": "x", "2": "y", "3": "z"}


@dataclass(frozen=True)
class Descriptor:
    pos: str  # adjective | noun | verb
    text: str
    target_type: str
    value: object  # float, or (lo, hi) for ranges

    def satisfied_by(self, x: float) -> bool:
        if self.target_type == UPPER:
            return x < self.value
        if self.target_type == LOWER:
            return x > self.value
        if self.target_type == RANGE:
            return self.value[0] <= x <= self.value[1]
        return x == self.value

    @property
    def numeric(self) -> bool:
        return any(ch.isdigit() for ch in self.text)


def _d(pos, text, tt, value):
    return Descriptor(pos, text, tt, tuple(value) if isinstance(value, list) else value)


def _directional_E(i):
    a = AXIS[i]
    return [
        _d("adjective", f"stiff along {a}", LOWER, 0.1),
        _d("noun", f"a high Young's modulus along the {a} axis", LOWER, 0.1),
        _d("noun", f"a low Young's modulus along the {a} axis", UPPER, 0.01),
        _d("verb", f"resists stretching along {a}", LOWER, 0.1),
        _d("verb", f"deforms easily when pulled along {a}", UPPER, 0.01),
    ]


def _directional_G(ij):
    a, b = AXIS[ij[0]], AXIS[ij[1]]
    return [
        _d("noun", f"a high shear modulus in the {a}{b} plane", LOWER, 0.05),
        _d("noun", f"a low shear modulus in the {a}{b} plane", UPPER, 0.005),
        _d("verb", f"resists shearing in the {a}{b} plane", LOWER, 0.05),
        _d("verb", f"shears easily in the {a}{b} plane", UPPER, 0.005),
    ]


def _directional_nu(ij):
    a, b = AXIS[ij[0]], AXIS[ij[1]]
    return [
        _d("noun", f"a negative Poisson ratio for loading along {a} with response along {b}", UPPER, 0.0),
        _d("noun", f"a positive Poisson ratio for loading along {a} with response along {b}", LOWER, 0.0),
        _d("verb", f"expands along {b} when stretched along {a}", UPPER, 0.0),
        _d("verb", f"contracts along {b} when stretched along {a}", LOWER, 0.0),
    ]


FULL_NAMES = {
    "E": "Young's modulus", "G": "shear modulus", "nu": "Poisson ratio", "K": "bulk modulus",
    "A": "anisotropy index", "V": "volume fraction",
}
for _i in "123":
    FULL_NAMES[f"E_{_i}"] = f"Young's modulus along {AXIS[_i]}"
for _ij in ("23", "13", "12"):
    FULL_NAMES[f"G_{_ij}"] = f"shear modulus in the {AXIS[_ij[0]]}{AXIS[_ij[1]]} plane"
for _ij in ("12", "13", "23", "21", "31", "32"):
    FULL_NAMES[f"nu_{_ij}"] = f"Poisson ratio {AXIS[_ij[0]]}{AXIS[_ij[1]]}"

DESCRIPTORS = {
    "nu": [
        _d("adjective", "auxetic", UPPER, 0.0),
        _d("noun", "a negative Poisson ratio", UPPER, 0.0),
        _d("noun", "a positive Poisson ratio", LOWER, 0.0),
        _d("verb", "contracts transversely under axial compression", UPPER, 0.0),
        _d("verb", "expands transversely under axial compression", LOWER, 0.0),
        _d("verb", "contracts in other directions when compressed along one axis", UPPER, 0.0),
        _d("verb", "expands in other directions when compressed along one axis", LOWER, 0.0),
        _d("verb", "expands transversely under axial elongation", UPPER, 0.0),
        _d("verb", "contracts transversely under axial elongation", LOWER, 0.0),
        _d("verb", "expands in other directions when stretched along one axis", UPPER, 0.0),
        _d("verb", "contracts in other directions when stretched along one axis", LOWER, 0.0),
        _d("adjective", "nearly incompressible", LOWER, 0.45),
    ],
    "E": [
        _d("adjective", "stiff", LOWER, 0.1),
        _d("adjective", "very stiff", LOWER, 0.3),
        _d("adjective", "compliant", UPPER, 0.01),
        _d("adjective", "extremely soft", UPPER, 0.001),
        _d("noun", "a high Young's modulus", LOWER, 0.1),
        _d("noun", "a low Young's modulus", UPPER, 0.01),
        _d("noun", "a Young's modulus between 0.01 and 0.1", RANGE, [0.01, 0.1]),
        _d("verb", "resists stretching", LOWER, 0.1),
        _d("verb", "stretches easily", UPPER, 0.01),
    ],
    "G": [
        _d("adjective", "shear resistant", LOWER, 0.05),
        _d("noun", "a high shear modulus", LOWER, 0.05),
        _d("noun", "a low shear modulus", UPPER, 0.005),
        _d("verb", "resists shearing", LOWER, 0.05),
        _d("verb", "shears easily", UPPER, 0.005),
    ],
    "K": [
        _d("noun", "a high bulk modulus", LOWER, 0.5),
        _d("noun", "a low bulk modulus", UPPER, 0.05),
        _d("verb", "resists changes in volume", LOWER, 0.5),
        _d("adjective", "easily compressible", UPPER, 0.05),
    ],
    "A": [
        _d("adjective", "nearly isotropic", UPPER, ANISOTROPY_THRESHOLD),
        _d("adjective", "anisotropic", LOWER, ANISOTROPY_THRESHOLD),
        _d("adjective", "strongly anisotropic", LOWER, 1.0),
        _d("noun", "direction-independent stiffness", UPPER, ANISOTROPY_THRESHOLD),
        _d("noun", "a strongly direction-dependent stiffness", LOWER, 1.0),
    ],
    "V": [
        _d("adjective", "very dense", LOWER, 0.8),
        _d("adjective", "dense", LOWER, 0.5),
        _d("adjective", "lightweight", UPPER, 0.2),
        _d("adjective", "ultralight", UPPER, 0.05),
        _d("noun", "a low density", UPPER, 0.2),
        _d("noun", "a volume fraction between 0.2 and 0.5", RANGE, [0.2, 0.5]),
        _d("verb", "uses little material", UPPER, 0.1),
    ],
}
for _i in "123":
    DESCRIPTORS[f"E_{_i}"] = _directional_E(_i)
for _ij in ("23", "13", "12"):
    DESCRIPTORS[f"G_{_ij}"] = _directional_G(_ij)
for _ij in ("12", "13", "23", "21", "31", "32"):
    DESCRIPTORS[f"nu_{_ij}"] = _directional_nu(_ij)


def generality(prop: str) -> str:
    return DIRECTIONAL if prop in FAMILY_OF else OVERALL


def family(prop: str) -> str:
    return FAMILY_OF.get(prop, prop)


@dataclass(frozen=True)
class Coverage:
    min: float
    max: float
    q1: float
    q3: float
    dense: tuple  # ((lo, hi), ...)

    @property
    def span(self) -> float:
        return self.max - self.min

    def density(self, x: float) -> float:
        """Coarse coverage level: dense ranges 1, elsewhere inside [min, max]
        0.5, outside 0.25."""
        if any(lo <= x <= hi for lo, hi in self.dense):
            return 1.0
        return 0.5 if self.min <= x <= self.max else 0.25


def load_ranges(path=None) -> dict:
    """PropertyRanges: symbol -> Coverage.  Defaults to the bundled file."""
    if path is None:
        text = resources.files(__package__).joinpath("data/property_ranges.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    raw = json.loads(text)["ranges"]
    return {k: Coverage(v["min"], v["max"], v["q1"], v["q3"],
                        tuple(tuple(r) for r in v["densely_populated_ranges"]))
            for k, v in raw.items()}
