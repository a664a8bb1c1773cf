"""Stats pass producing PropertyRanges from a set of simulated property maps."""
from __future__ import annotations

import json

import numpy as np

from .reference import PROPERTIES, Coverage

DENSE_BINS = 10
DENSE_FACTOR = 1.5  # a bin is dense when it holds this multiple of the mean count
MIN_SPAN = 1e-6
# reference listing for Poisson ratios; used for nu and the directional ratios
NU_ROW = Coverage(-0.5, 0.5, 0.3, 0.36, ((0.2, 0.4),))


def dense_ranges(x: np.ndarray, lo: float, hi: float) -> tuple:
    counts, edges = np.histogram(x, bins=DENSE_BINS, range=(lo, hi))
    hot = counts >= DENSE_FACTOR * counts.mean()
    out, start = [], None
    for i, h in enumerate(list(hot) + [False]):
        if h and start is None:
            start = i
        elif not h and start is not None:
            out.append((float(edges[start]), float(edges[i])))
            start = None
    return tuple(out)


def coverage(values) -> Coverage:
    x = np.asarray([v for v in values if np.isfinite(v)], dtype=float)
    if x.size == 0:
        raise ValueError("no finite samples")
    lo, hi = float(x.min()), float(x.max())
    if hi - lo < MIN_SPAN:
        lo, hi = lo - MIN_SPAN, hi + MIN_SPAN
    q1, q3 = (float(q) for q in np.quantile(x, [0.25, 0.75]))
    return Coverage(lo, hi, q1, q3, dense_ranges(x, lo, hi))


def compute_ranges(samples, nu_from_reference: bool = True) -> dict:
    """samples: iterable of property maps keyed by serialized symbol."""
    samples = list(samples)
    out = {}
    for p in PROPERTIES:
        if nu_from_reference and p.startswith("nu"):
            out[p] = NU_ROW
        else:
            out[p] = coverage([s[p] for s in samples])
    return out


def ranges_to_json(ranges: dict, meta: dict = None) -> str:
    doc = {"ranges": {k: {"min": c.min, "max": c.max, "q1": c.q1, "q3": c.q3,
                          "densely_populated_ranges": [list(r) for r in c.dense]}
                      for k, c in ranges.items()}}
    if meta:
        doc["meta"] = meta
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def corpus_samples(names=None, R: int = 32, mutants: int = 0, seed: int = 0, log=None) -> list:
    """Property maps of the valid seed programs and of seeded mutants of them."""
    from .. import corpus
    from ..augment import MutationConfig, derive_seed, emit_program, mutate
    from ..errors import MetagenError
    from ..frontend import compile_source
    from ..quality import validate_model

    out = []
    for k, name in enumerate(names or corpus.SEEDS):
        src = corpus.load(name)
        programs = [(name, src)]
        if mutants:
            ir = compile_source(src)
            for i in range(mutants):
                try:
                    child, _ = mutate(ir, MutationConfig(seed=derive_seed(seed, 1000 * k + i)))
                except MetagenError:
                    continue
                programs.append((f"{name}/m{i}", emit_program(child)))
        for label, prog in programs:
            rep = validate_model(prog, R)
            if log:
                log(f"{label}: overall={rep.overall}")
            if rep.overall:
                out.append(rep.properties)
    return out
