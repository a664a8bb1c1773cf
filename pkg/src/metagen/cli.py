"""Command-line entry point ``metagen``.

Machine-readable output goes to files or standard output, diagnostics to
standard error.  Exit codes: 0 success, 1 diagnostics or failed checks,
2 solver failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

R_MIN, R_MAX = 2, 512
THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _resolution(text: str) -> int:
    try:
        r = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"resolution must be an integer, got {text!r}") from None
    if not R_MIN <= r <= R_MAX:
        raise argparse.ArgumentTypeError(f"resolution must be in [{R_MIN}, {R_MAX}], got {r}")
    return r


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    k, v = text.split("=", 1)
    import yaml

    val = yaml.safe_load(v)
    if isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    return k.strip(), val


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path) -> str:
    from .errors import IoFailure

    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from None


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")


def _compile(path, params):
    from .frontend import compile_source

    return compile_source(_read(path), dict(params or []))


def _db_root(args):
    root = args.db or os.environ.get("METADB_ROOT")
    if not root:
        raise SystemExit("error: no database root (use --db or METADB_ROOT)")
    return root


# ------------------------------------------------------------------ commands

def cmd_compile(args) -> int:
    from .assembly import transpile_report

    ir = _compile(args.file, args.param)
    _write(args.out, transpile_report(ir))
    return 0


def cmd_simulate(args) -> int:
    from .discretize import voxelize
    from .quality import simulate

    ir = _compile(args.file, args.param)
    grid = voxelize(ir, args.res)
    C, props = simulate(grid)
    doc = {"resolution": args.res, "properties": props.to_dict(), "C": C.tolist()}
    _write(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_geom(args) -> int:
    from .discretize import TriMesh, extract_mesh, obj_text, voxel_surface, voxelize

    ir = _compile(args.file, args.param)
    if args.voxels:
        mesh = voxel_surface(voxelize(ir, args.res).occupancy)
    else:
        mesh = extract_mesh(ir, args.res)
    assert isinstance(mesh, TriMesh)
    _write(args.out, obj_text(mesh))
    _err(f"{len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles, "
         f"closed={mesh.is_closed}")
    return 0


def cmd_render(args) -> int:
    from .discretize import extract_mesh, read_obj, render_views, save_png

    if str(args.file).endswith(".obj"):
        mesh = read_obj(args.file)
    else:
        mesh = extract_mesh(_compile(args.file, args.param), args.res)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for img in render_views(mesh, args.size):
        save_png(img, out / f"render_{img.name}.png")
        print(out / f"render_{img.name}.png")
    return 0


def cmd_validate(args) -> int:
    from .quality import validate_model

    rep = validate_model(_read(args.file), args.res, dict(args.param or []))
    _write(args.out, rep.to_json(timings=not args.no_timings) + "\n")
    if not rep.overall:
        reason = rep.diagnostics or rep.tilable_reason or rep.physical_reason
        _err(f"{args.file}: invalid: {reason}")
    return 0 if rep.overall else 1


def cmd_mutate(args) -> int:
    from .augment import MutationConfig, derive_seed, emit_program, mutate
    from .frontend import evaluate, list_params, parse_program
    from .metadb import parse_header, record_provenance, write_header

    text = _read(args.file)
    ast = parse_program(text)
    ir = evaluate(ast)
    params = list_params(ast)
    parent = args.parent or f"/models/{Path(args.file).stem}"
    out = []
    for i in range(args.count):
        seed = args.seed if args.count == 1 else derive_seed(args.seed, i)
        child, trace = mutate(ir, MutationConfig(seed=seed))
        frag = record_provenance("mutated", {"parent": parent, "trace": trace.to_dict(),
                                             "arguments": {"seed": int(seed)}})
        prog = emit_program(child, params, header=write_header(frag))
        parse_header(prog)  # the header must read back
        out.append(prog)
    if args.count == 1:
        _write(args.out, out[0])
    else:
        d = Path(args.out or ".")
        d.mkdir(parents=True, exist_ok=True)
        for i, prog in enumerate(out):
            (d / f"{Path(args.file).stem}_m{i}.py").write_text(prog, encoding="utf-8")
            print(d / f"{Path(args.file).stem}_m{i}.py")
    return 0


def cmd_ingest(args) -> int:
    from .metadb import ingest_model

    entry = ingest_model(_db_root(args), _read(args.file), args.id or Path(args.file).stem,
                         args.res, args.size)
    print(json.dumps({"id": entry.model_id, "ok": entry.ok, "files": entry.files,
                      "report": entry.report.to_dict(timings=False)}, indent=2, sort_keys=True))
    return 0 if entry.ok else 1


def cmd_generate(args) -> int:
    from .metadb import generate_family

    progs = generate_family(args.generator, dict(args.param or []), args.db)
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    for i, prog in enumerate(progs):
        (d / f"{args.generator}_{i}.py").write_text(prog, encoding="utf-8")
        print(d / f"{args.generator}_{i}.py")
    return 0


# ---------------------------------------------------------------------- bench

def cmd_bench_build(args) -> int:
    from .benchkit import build_model_tasks, load_ranges, make_splits, write_jsonl
    from .benchkit.records import TASK_TYPES
    from .metadb import list_models, load_model

    root = _db_root(args)
    ranges = load_ranges(args.ranges)
    ids = args.models or list_models(root)
    splits = make_splits(ids, args.seed, args.test, args.validate)
    out = Path(args.out or Path(root) / "benchmark")
    counts = {}
    for split, members in splits.items():
        by_type = {t: [] for t in TASK_TYPES}
        for mid in members:
            for rec in build_model_tasks(load_model(root, mid, args.res), ranges, args.seed):
                by_type[rec.task_type].append(rec)
        for t, recs in by_type.items():
            (out / t).mkdir(parents=True, exist_ok=True)
            write_jsonl(recs, out / t / f"{split}.jsonl")
            counts[f"{t}/{split}"] = len(recs)
        (out / "omnitask").mkdir(parents=True, exist_ok=True)
        write_jsonl([r for t in TASK_TYPES for r in by_type[t]], out / "omnitask" / f"{split}.jsonl")
    print(json.dumps({"splits": {k: len(v) for k, v in splits.items()}, "records": counts},
                     indent=2, sort_keys=True))
    return 0


class _Simulator:
    """Program -> (grid, props) with a cache keyed by program text."""

    def __init__(self, R: int):
        self.R = R
        self.cache = {}

    def __call__(self, code: str, need_props: bool):
        key = (hashlib.sha256(code.encode("utf-8")).hexdigest(), need_props)
        if key not in self.cache:
            self.cache[key] = self._run(code, need_props)
        return self.cache[key]

    def _run(self, code, need_props):
        from .errors import MetagenError
        from .quality import validate_model

        art = {}
        try:
            if need_props:
                rep = validate_model(code, self.R, artifacts=art)
                if not rep.overall:
                    return None
                return art["grid"], rep.properties
            from .discretize import voxelize
            from .frontend import compile_source

            return voxelize(compile_source(code), self.R), None
        except MetagenError:
            return None


def _load_predictions(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            if line.strip():
                d = json.loads(line)
                out[d["label"]] = d
    return out


def _extract_code(pred: dict):
    from .augment import extract_code_block

    code = pred.get("code")
    return extract_code_block(code) if isinstance(code, str) else None


def cmd_bench_eval(args) -> int:
    import numpy as np

    from .benchkit import (TargetProfile, eval_inverse, eval_reconstruction, eval_understanding,
                           load_ranges, read_jsonl)
    from .errors import BothEmpty, MissingKey
    from .metadb import resolve_path

    ranges = load_ranges(args.ranges)
    records = read_jsonl(args.records)
    preds = _load_predictions(args.predictions)
    sim = _Simulator(args.res)
    root = args.db or os.environ.get("METADB_ROOT")
    acc = {}
    for rec in records:
        a = acc.setdefault(rec.task_type, {"n": 0, "valid": 0, "metrics": {}})
        a["n"] += 1
        pred = preds.get(rec.label)
        if pred is None:
            continue
        m = None
        if rec.task_type == "reconstruction":
            code = _extract_code(pred)
            got = sim(code, False) if code else None
            gt = rec.data["ground_truth"]
            truth = sim(resolve_path(root, None, gt["program"]).read_text(encoding="utf-8"),
                        False) if root else None
            if got is not None and truth is not None:
                try:
                    m = eval_reconstruction(got[0], truth[0])
                except BothEmpty:
                    m = None
        elif rec.task_type == "material_understanding":
            props = pred.get("properties")
            if isinstance(props, dict):
                try:
                    m = {"error": eval_understanding(props, rec.data["properties"], ranges)}
                except (MissingKey, TypeError, ValueError):
                    m = None
        else:
            code = _extract_code(pred)
            got = sim(code, True) if code else None
            if got is not None:
                profile = TargetProfile.from_dict(rec.data["profile"])
                m = {"error": eval_inverse(profile, got[1], ranges)}
        if m is not None:
            a["valid"] += 1
            for k, v in m.items():
                a["metrics"].setdefault(k, []).append(v)
    report = {}
    for t, a in sorted(acc.items()):
        report[t] = {"count": a["n"], "valid": a["valid"],
                     "valid_rate": a["valid"] / a["n"] if a["n"] else 0.0}
        for k, vs in a["metrics"].items():
            report[t][k] = float(np.mean(vs))
    _write(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_bench_ranges(args) -> int:
    from .benchkit.stats import compute_ranges, corpus_samples, ranges_to_json

    samples = corpus_samples(args.names, args.res, args.mutants, args.seed, log=_err)
    meta = {"samples": len(samples), "resolution": args.res, "mutants_per_seed": args.mutants,
            "seed": args.seed}
    _write(args.out, ranges_to_json(compute_ranges(samples), meta))
    return 0


# --------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--db", help="database root (default: $METADB_ROOT)")
    common.add_argument("--res", type=_resolution, default=32, help="voxel resolution (2..512)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=0, help="BLAS threads, 0 = auto")

    prog_args = argparse.ArgumentParser(add_help=False)
    prog_args.add_argument("file")
    prog_args.add_argument("--param", action="append", type=_param, metavar="NAME=VALUE")

    p = argparse.ArgumentParser(prog="metagen", description="MetaDSL toolchain")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("compile", parents=[common, prog_args], help="parse and evaluate")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compile)
    s = sub.add_parser("simulate", parents=[common, prog_args], help="homogenized properties")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)
    s = sub.add_parser("geom", parents=[common, prog_args], help="export an OBJ surface")
    s.add_argument("--out")
    s.add_argument("--voxels", action="store_true", help="voxel-face surface (debug)")
    s.set_defaults(func=cmd_geom)
    s = sub.add_parser("render", parents=[common, prog_args], help="four standard views")
    s.add_argument("--outdir", default=".")
    s.add_argument("--size", type=int, default=512)
    s.set_defaults(func=cmd_render)
    s = sub.add_parser("validate", parents=[common, prog_args], help="admission checks")
    s.add_argument("--out")
    s.add_argument("--no-timings", action="store_true")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("mutate", parents=[common, prog_args], help="seeded mutation")
    s.add_argument("--out")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--parent", help="database path of the parent model")
    s.set_defaults(func=cmd_mutate)
    s = sub.add_parser("ingest", parents=[common, prog_args], help="add a model to the database")
    s.add_argument("--id")
    s.add_argument("--size", type=int, default=512)
    s.set_defaults(func=cmd_ingest)
    s = sub.add_parser("generate", parents=[common], help="run a program generator")
    s.add_argument("generator")
    s.add_argument("--param", action="append", type=_param, metavar="NAME=VALUE")
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="benchmark construction and scoring")
    bsub = b.add_subparsers(dest="bench_command", required=True)
    s = bsub.add_parser("build", parents=[common], help="write per-task JSONL splits")
    s.add_argument("--out")
    s.add_argument("--models", nargs="*")
    s.add_argument("--test", type=int)
    s.add_argument("--validate", type=int)
    s.add_argument("--ranges")
    s.set_defaults(func=cmd_bench_build)
    s = bsub.add_parser("eval", parents=[common], help="score predictions")
    s.add_argument("records")
    s.add_argument("predictions")
    s.add_argument("--out")
    s.add_argument("--ranges")
    s.set_defaults(func=cmd_bench_eval)
    s = bsub.add_parser("ranges", parents=[common], help="property ranges from the seed corpus")
    s.add_argument("--out")
    s.add_argument("--names", nargs="*")
    s.add_argument("--mutants", type=int, default=0)
    s.set_defaults(func=cmd_bench_ranges)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads > 0:
        for v in THREAD_VARS:
            os.environ[v] = str(args.threads)
    from .errors import IllConditioned, MetagenError, SingularSystem, SolverNoConvergence

    try:
        return args.func(args)
    except (SolverNoConvergence, SingularSystem, IllConditioned) as e:
        _err(f"{getattr(args, 'file', 'metagen')}: error: {type(e).__name__}: {e}")
        return 2
    except MetagenError as e:
        if hasattr(args, "file"):
            _err(e.format(args.file))
        else:
            _err(f"metagen: error: {type(e).__name__}: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
