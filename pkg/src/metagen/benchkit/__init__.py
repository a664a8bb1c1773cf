"""MetaBench construction and scoring."""
from .metrics import chamfer, eval_inverse, eval_reconstruction, eval_understanding, iou
from .records import TASK_TYPES, TaskRecord, read_jsonl, record_from_dict, write_jsonl
from .reference import (ANISOTROPY_THRESHOLD, DESCRIPTORS, FAMILIES, PROPERTIES, Coverage,
                        Descriptor, load_ranges)
from .stats import compute_ranges, ranges_to_json
from .tasks import (QUERY_PREFIX, BenchModel, Target, TargetProfile, build_inverse_tasks,
                    build_model_tasks, build_reconstruction_tasks, build_understanding_tasks,
                    make_splits, render_inverse_query, select_active_properties, select_targets)
from .templates import api_description, system_prompt

__all__ = [
    "chamfer", "eval_inverse", "eval_reconstruction", "eval_understanding", "iou",
    "TASK_TYPES", "TaskRecord", "read_jsonl", "record_from_dict", "write_jsonl",
    "ANISOTROPY_THRESHOLD", "DESCRIPTORS", "FAMILIES", "PROPERTIES", "Coverage", "Descriptor",
    "load_ranges", "compute_ranges", "ranges_to_json", "QUERY_PREFIX", "BenchModel", "Target",
    "TargetProfile", "build_inverse_tasks", "build_model_tasks", "build_reconstruction_tasks",
    "build_understanding_tasks", "make_splits", "render_inverse_query",
    "select_active_properties", "select_targets", "api_description", "system_prompt",
]
