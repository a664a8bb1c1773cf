"""Scalar properties of a homogenized stiffness tensor."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from ..errors import IllConditioned

COND_LIMIT = 1e12

# serialized key for each field
KEYS = {
    "E": "E", "E1": "E_1", "E2": "E_2", "E3": "E_3",
    "G": "G", "G23": "G_23", "G13": "G_13", "G12": "G_12",
    "nu": "nu", "nu12": "nu_12", "nu13": "nu_13", "nu23": "nu_23",
    "nu21": "nu_21", "nu31": "nu_31", "nu32": "nu_32",
    "K": "K", "A": "A", "V": "V",
}
PROPERTY_NAMES = tuple(KEYS.values())


@dataclass
class PropertyVector:
    E: float
    E1: float
    E2: float
    E3: float
    G: float
    G23: float
    G13: float
    G12: float
    nu: float
    nu12: float
    nu13: float
    nu23: float
    nu21: float
    nu31: float
    nu32: float
    K: float
    A: float
    V: float

    def to_dict(self) -> dict:
        return {KEYS[k]: float(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "PropertyVector":
        inv = {v: k for k, v in KEYS.items()}
        return cls(**{inv[k]: float(v) for k, v in d.items() if k in inv})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def values(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])


def vrh(C: np.ndarray) -> dict:
    """Voigt, Reuss and Hill bulk/shear moduli."""
    C = np.asarray(C, dtype=float)
    S = np.linalg.inv(C)
    tr_c = C[0, 0] + C[1, 1] + C[2, 2]
    off_c = C[0, 1] + C[0, 2] + C[1, 2]
    sh_c = C[3, 3] + C[4, 4] + C[5, 5]
    tr_s = S[0, 0] + S[1, 1] + S[2, 2]
    off_s = S[0, 1] + S[0, 2] + S[1, 2]
    sh_s = S[3, 3] + S[4, 4] + S[5, 5]
    KV = (tr_c + 2 * off_c) / 9.0
    GV = (tr_c - off_c) / 15.0 + sh_c / 5.0
    KR = 1.0 / (tr_s + 2 * off_s)
    GR = 15.0 / (4 * tr_s - 4 * off_s + 3 * sh_s)
    return dict(KV=KV, GV=GV, KR=KR, GR=GR, K=0.5 * (KV + KR), G=0.5 * (GV + GR), S=S)


def extract_properties(C: np.ndarray, V: float) -> PropertyVector:
    """The 18 scalar properties; nu_ij = -S_ji / S_ii (load along i)."""
    C = np.asarray(C, dtype=float)
    if not np.all(np.isfinite(C)):
        raise IllConditioned("stiffness tensor has non-finite entries")
    cond = np.linalg.cond(C)
    if not np.isfinite(cond) or cond >= COND_LIMIT:
        raise IllConditioned(f"stiffness tensor condition number {cond:.3g} >= {COND_LIMIT:g}")
    m = vrh(C)
    S, K, G = m["S"], m["K"], m["G"]
    E = 9 * K * G / (3 * K + G)
    nu = (3 * K - 2 * G) / (2 * (3 * K + G))
    A = 5 * m["GV"] / m["GR"] + m["KV"] / m["KR"] - 6

    def pr(i, j):
        return -S[j, i] / S[i, i]

    return PropertyVector(
        E=E, E1=1 / S[0, 0], E2=1 / S[1, 1], E3=1 / S[2, 2],
        G=G, G23=1 / S[3, 3], G13=1 / S[4, 4], G12=1 / S[5, 5],
        nu=nu, nu12=pr(0, 1), nu13=pr(0, 2), nu23=pr(1, 2),
        nu21=pr(1, 0), nu31=pr(2, 0), nu32=pr(2, 1),
        K=K, A=A, V=float(V))


def round_2sf(x: float) -> float:
    """Two significant figures, ties away from zero, using the shortest
    decimal representation of x (so 0.995 -> 1.0)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"round_2sf needs a finite value, got {x}")
    if x == 0.0:
        return 0.0
    d = Decimal(repr(x))
    q = Decimal(1).scaleb(d.adjusted() - 1)
    out = float(d.quantize(q, rounding=ROUND_HALF_UP))
    return 0.0 if out == 0.0 else out


def round_props(props: dict) -> dict:
    return {k: round_2sf(v) for k, v in props.items()}
