"""MetaBench task construction: splits, reconstruction, understanding and
inverse-design records."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import MissingProperties, MissingRenders, TooFewModels
from ..homogenize.properties import round_2sf
from .records import TaskRecord
from .reference import (ANISOTROPY_THRESHOLD, DESCRIPTORS, FAMILIES, FAMILY_OF, FULL_NAMES,
                        LOWER, PROPERTIES, RANGE, UPPER, VALUE)
from .templates import (VIEW_ORDER, inverse_query, reconstruction_query,
                        understanding_multi_query, understanding_single_query)

PAPER_TOTAL, PAPER_TEST, PAPER_VAL = 13282, 500, 50
GLOBAL_KEYS = ("A", "E", "K", "G", "nu", "V")
# heuristic weights of the active-property score
W_ISOTROPY, W_GAP, W_LIGHT, W_EXTREME = 10.0, 5.0, 3.0, 2.0
P_RANDOM_FILL = 0.10
LIGHT_RATIO = 0.5


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def sub_seed(seed: int, *keys) -> int:
    words = [int(seed) & (2 ** 64 - 1)]
    for k in keys:
        words.extend(k.encode("utf-8") if isinstance(k, str) else [int(k)])
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])


# ------------------------------------------------------------------ splits

def make_splits(model_ids, seed: int = 0, test: int = None, validate: int = None) -> dict:
    """Disjoint random partition; default sizes scale the 500 / 50 / rest split."""
    ids = sorted(set(model_ids))
    n = len(ids)
    if test is None:
        test = max(1, round(n * PAPER_TEST / PAPER_TOTAL))
    if validate is None:
        validate = max(1, round(n * PAPER_VAL / PAPER_TOTAL))
    if n < test + validate + 1:
        raise TooFewModels(f"{n} models cannot fill test={test}, validate={validate} "
                           "and a nonempty train split")
    order = _rng(seed).permutation(n)
    shuffled = [ids[i] for i in order]
    return {"test": shuffled[:test], "validate": shuffled[test:test + validate],
            "train": shuffled[test + validate:]}


# ------------------------------------------------------------------ models

@dataclass
class BenchModel:
    model_id: str
    source: str  # database path, "/models/<id>/model.py"
    code: str  # program body without header
    renders: dict = field(default_factory=dict)  # view -> database path
    properties: dict = None  # full-precision property map
    resolution: int = 32


def _need_renders(model: BenchModel, views):
    missing = [v for v in views if v not in (model.renders or {})]
    if missing:
        raise MissingRenders(f"model {model.model_id} lacks renders: {', '.join(missing)}")


def build_reconstruction_tasks(model: BenchModel, n: int) -> list:
    """One record per n-subset of the four views, in top/front/right/angled order."""
    if not 1 <= n <= 4:
        raise ValueError(f"n must be 1..4, got {n}")
    _need_renders(model, VIEW_ORDER)
    out = []
    for combo in itertools.combinations(VIEW_ORDER, n):
        images = {v: model.renders[v] for v in combo}
        data = {"images": {v: model.renders[v] for v in combo},
                "ground_truth": {"program": model.source, "resolution": model.resolution}}
        out.append(TaskRecord("reconstruction", f"{model.model_id}/reconstruction/{'+'.join(combo)}",
                              model.source, data, reconstruction_query(images),
                              f"```python\n{model.code.rstrip()}\n```"))
    return out


def understanding_response(props: dict) -> str:
    body = json.dumps({k: round_2sf(props[k]) for k in GLOBAL_KEYS}, indent=4)
    return f"```json\n{body}\n```"


def build_understanding_tasks(model: BenchModel) -> list:
    if not model.properties or any(k not in model.properties for k in GLOBAL_KEYS):
        raise MissingProperties(f"model {model.model_id} has no simulated properties")
    _need_renders(model, VIEW_ORDER)
    truth = {k: round_2sf(model.properties[k]) for k in GLOBAL_KEYS}
    resp = understanding_response(model.properties)
    single = TaskRecord(
        "material_understanding", f"{model.model_id}/material_understanding/single_image",
        model.source, {"images": {"angled": model.renders["angled"]}, "properties": truth},
        understanding_single_query(model.renders["angled"]), resp)
    images = {v: model.renders[v] for v in VIEW_ORDER}
    multi = TaskRecord(
        "material_understanding", f"{model.model_id}/material_understanding/multiview_and_code",
        model.source, {"images": dict(model.renders), "properties": truth},
        understanding_multi_query(model.code, images), resp)
    return [single, multi]


# ------------------------------------------------------------ inverse design

def property_scores(props: dict, ranges: dict) -> dict:
    score = {p: 0.0 for p in PROPERTIES}
    if props["A"] < ANISOTROPY_THRESHOLD:
        score["A"] += W_ISOTROPY
    else:
        for fam, ds in FAMILIES.items():
            for d in ds:
                gap = max(abs(props[d] - props[o]) for o in ds if o != d)
                score[d] += W_GAP * gap / ranges[d].span
    if props["V"] > 0 and props["E"] / props["V"] > LIGHT_RATIO:
        score["E"] += W_LIGHT
        score["V"] += W_LIGHT
    for p in PROPERTIES:
        cov, x = ranges[p], props[p]
        ext = max(cov.q1 - x, x - cov.q3, 0.0) / cov.span
        score[p] += W_EXTREME * ext + 1.0 / cov.density(x)
    return score


def allowed(p: str, chosen, isotropic: bool) -> bool:
    if p in chosen:
        return False
    if p in FAMILY_OF:
        return not isotropic and FAMILY_OF[p] not in chosen
    if p in FAMILIES:
        return not any(d in chosen for d in FAMILIES[p])
    return True


def select_active_properties(props: dict, ranges: dict, n: int, seed) -> list:
    """Greedy by heuristic score under the overall-xor-directional rule; after
    each pick, with probability 0.1 the rest is filled at random."""
    if not 1 <= n <= 6:
        raise ValueError(f"n must be 1..6, got {n}")
    rng = _rng(seed)
    iso = props["A"] < ANISOTROPY_THRESHOLD
    score = property_scores(props, ranges)
    chosen = []
    while len(chosen) < n:
        cand = [p for p in PROPERTIES if allowed(p, chosen, iso)]
        if not cand:
            break
        chosen.append(max(cand, key=lambda p: (score[p], -PROPERTIES.index(p))))
        if len(chosen) < n and rng.random() < P_RANDOM_FILL:
            while len(chosen) < n:
                cand = [p for p in PROPERTIES if allowed(p, chosen, iso)]
                if not cand:
                    break
                chosen.append(cand[int(rng.integers(len(cand)))])
            break
    return chosen


@dataclass
class Target:
    property: str
    target_type: str
    target_value: object
    descriptions: list  # [(text, part_of_speech)]

    def to_dict(self) -> dict:
        v = list(self.target_value) if isinstance(self.target_value, tuple) else self.target_value
        return {"property": self.property, "target_type": self.target_type, "target_value": v,
                "target_descriptions": [{"text": t, "part_of_speech": pos}
                                        for t, pos in self.descriptions]}

    @classmethod
    def from_dict(cls, d: dict) -> "Target":
        v = d["target_value"]
        return cls(d["property"], d["target_type"], tuple(v) if isinstance(v, list) else v,
                   [(x["text"], x["part_of_speech"]) for x in d["target_descriptions"]])


@dataclass
class TargetProfile:
    targets: list

    def to_dict(self) -> dict:
        return {"targets": [t.to_dict() for t in self.targets]}

    @classmethod
    def from_dict(cls, d: dict) -> "TargetProfile":
        return cls([Target.from_dict(t) for t in d["targets"]])


def _gap(x: float, target_type: str, value) -> float:
    if target_type == RANGE:
        return min(abs(x - value[0]), abs(x - value[1]))
    return abs(x - value)


def select_targets(props: dict, chosen, reference: dict = None, seed=0) -> TargetProfile:
    """Tightest satisfied descriptor group per property, else a 2 s.f. value."""
    reference = DESCRIPTORS if reference is None else reference
    rng = _rng(seed)
    out = []
    for p in chosen:
        x = props[p]
        groups = {}
        for d in reference.get(p, ()):
            if d.satisfied_by(x):
                groups.setdefault((d.value, d.target_type), []).append(d)
        if not groups:
            out.append(Target(p, VALUE, round_2sf(x), []))
            continue
        best = min(_gap(x, t, v) for v, t in groups)
        values = sorted({v for v, t in groups if _gap(x, t, v) == best}, key=str)
        value = values[0]
        types = sorted(t for v, t in groups if v == value)
        ttype = types[int(rng.integers(len(types)))] if len(types) > 1 else types[0]
        descs = groups[(value, ttype)]
        out.append(Target(p, ttype, value, [(d.text, d.pos) for d in descs]))
    return TargetProfile(out)


def _num(v) -> str:
    return f"{v:g}"


def aside(t: Target) -> str:
    s = t.property
    if t.target_type == UPPER:
        return f"({s} < {_num(t.target_value)})"
    if t.target_type == LOWER:
        return f"({s} > {_num(t.target_value)})"
    if t.target_type == RANGE:
        lo, hi = t.target_value
        return f"({_num(lo)} <= {s} <= {_num(hi)})"
    return f"({s} = {_num(t.target_value)})"


def _join(items) -> str:
    if len(items) <= 1:
        return "".join(items)
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f", and {items[-1]}"


def query_target(profile: TargetProfile, seed) -> str:
    """The noun phrase after "creates": article, adjectives, material, clauses."""
    if not profile.targets:
        raise ValueError("empty target profile")
    rng = _rng(seed)
    bins = {"adjective": [], "noun": [], "verb": []}
    for t in profile.targets:
        if t.descriptions:
            text, pos = t.descriptions[int(rng.integers(len(t.descriptions)))]
            if not any(ch.isdigit() for ch in text):
                text = f"{text} {aside(t)}"
        else:
            text, pos = f"a {FULL_NAMES[t.property]} of {_num(t.target_value)}", "noun"
        bins[pos].append(text)
    for k in bins:
        bins[k] = [bins[k][i] for i in rng.permutation(len(bins[k]))]
    front, back = [], []
    for a in bins["adjective"]:
        (front if rng.random() < 0.5 else back).append(a)
    if front:
        article = "an" if front[0][0].lower() in "aeiou" else "a"
        head = f"{article} {', '.join(front)} material"
    else:
        head = "a material"
    clauses = []
    if back:
        clauses.append("that is " + _join(back))
    if bins["verb"]:
        clauses.append("that " + _join(bins["verb"]))
    if bins["noun"]:
        clauses.append("with " + _join(bins["noun"]))
    return head + (" " + _join(clauses) if clauses else "")


QUERY_PREFIX = "Write a metagen program that creates "


def render_inverse_query(profile: TargetProfile, seed) -> str:
    return f"{QUERY_PREFIX}{query_target(profile, seed)}."


def build_inverse_tasks(model: BenchModel, ranges: dict, seed: int = 0, counts=range(1, 7)) -> list:
    if not model.properties:
        raise MissingProperties(f"model {model.model_id} has no simulated properties")
    out = []
    for n in counts:
        s = sub_seed(seed, model.model_id, n)
        chosen = select_active_properties(model.properties, ranges, n, s)
        profile = select_targets(model.properties, chosen, seed=s + 1)
        target = query_target(profile, s + 2)
        out.append(TaskRecord("inverse_design", f"{model.model_id}/inverse_design/n{n}",
                              model.source, {"profile": profile.to_dict()},
                              inverse_query(target), f"```python\n{model.code.rstrip()}\n```"))
    return out


def build_model_tasks(model: BenchModel, ranges: dict, seed: int = 0) -> list:
    """15 reconstruction + 2 understanding + 6 inverse-design records."""
    recs = []
    for n in range(1, 5):
        recs += build_reconstruction_tasks(model, n)
    recs += build_understanding_tasks(model)
    recs += build_inverse_tasks(model, ranges, seed)
    return recs


__all__ = ["BenchModel", "Target", "TargetProfile", "make_splits", "build_reconstruction_tasks",
           "build_understanding_tasks", "build_inverse_tasks", "build_model_tasks",
           "select_active_properties", "select_targets", "render_inverse_query", "query_target",
           "property_scores", "GLOBAL_KEYS", "QUERY_PREFIX"]
