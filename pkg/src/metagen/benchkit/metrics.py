"""Scores for the three task families."""
from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from ..errors import BothEmpty, MissingKey, PreconditionError
from ..homogenize.properties import round_2sf
from .reference import LOWER, RANGE, UPPER, VALUE
from .tasks import GLOBAL_KEYS


def _occ(g) -> np.ndarray:
    return np.asarray(getattr(g, "occupancy", g), dtype=bool)


def iou(a, b) -> float:
    A, B = _occ(a), _occ(b)
    union = np.count_nonzero(A | B)
    if union == 0:
        raise BothEmpty("IoU is undefined for two empty grids")
    return np.count_nonzero(A & B) / union


def chamfer(a, b) -> float:
    """Symmetric mean nearest-voxel-centre distance in cell lengths.

    If exactly one grid is empty the result is the cell diagonal sqrt(3),
    the largest distance the cell admits.
    """
    A, B = _occ(a), _occ(b)
    R = A.shape[0]
    if not A.any() and not B.any():
        raise BothEmpty("chamfer distance is undefined for two empty grids")
    if not A.any() or not B.any():
        return math.sqrt(3.0)
    dB = ndimage.distance_transform_edt(~B)  # distance to the nearest B voxel, in voxels
    dA = ndimage.distance_transform_edt(~A)
    return 0.5 * (dB[A].mean() + dA[B].mean()) / R


def eval_reconstruction(pred, truth) -> dict:
    A, B = _occ(pred), _occ(truth)
    if A.shape != B.shape:
        raise PreconditionError(f"resolution mismatch {A.shape} vs {B.shape}")
    return {"iou": iou(A, B), "chamfer": chamfer(A, B)}


def eval_understanding(pred: dict, truth: dict, ranges: dict) -> float:
    for k in GLOBAL_KEYS:
        if k not in pred:
            raise MissingKey(f"prediction lacks key {k!r}", key=k)
    return float(np.mean([abs(float(pred[k]) - float(truth[k])) / ranges[k].span
                          for k in GLOBAL_KEYS]))


def target_error(t, x: float, span: float) -> float:
    v = t.target_value
    if t.target_type == VALUE:
        if round_2sf(x) == v:
            return 0.0
        return abs(x - v) / span
    if t.target_type == UPPER:
        return max(0.0, x - v) / span
    if t.target_type == LOWER:
        return max(0.0, v - x) / span
    if t.target_type == RANGE:
        lo, hi = v
        return max(0.0, lo - x, x - hi) / span
    raise ValueError(f"unknown target type {t.target_type}")


def eval_inverse(profile, simulated: dict, ranges: dict) -> float:
    """Mean normalized violation over targets, clipped to [0, 1]."""
    sim = simulated.to_dict() if hasattr(simulated, "to_dict") else simulated
    errs = [target_error(t, float(sim[t.property]), ranges[t.property].span)
            for t in profile.targets]
    return float(min(1.0, max(0.0, np.mean(errs))))
