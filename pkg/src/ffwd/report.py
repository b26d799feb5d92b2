"""Structured-text reports for rate plans, selections and metrics.

Every report is a JSON object written with one top-level key per line and
arrays kept on a single line, so files diff well and stay byte-stable.
Keys appear in a fixed order. Metrics that cannot be computed are written as
the string ``"NotAvailable"``. See ``docs/report_schema.md`` for field lists.
"""

from __future__ import annotations

import json
import os

from .errors import InvariantViolation, IoFailure
from .metrics import MetricsReport
from .model import BridgeSegment, Entry, Segment, Selection
from .profile import RatePlan

NOT_AVAILABLE = "NotAvailable"
PLAN_SCHEMA = "ffwd.rateplan/1"
SELECTION_SCHEMA = "ffwd.selection/1"
METRICS_SCHEMA = "ffwd.metrics/1"
ABLATION_SCHEMA = "ffwd.ablation/1"


def dumps(obj: dict) -> str:
    lines = []
    for key, value in obj.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            inner = ",\n".join("    " + json.dumps(v) for v in value)
            text = "[\n" + inner + "\n  ]"
        else:
            text = json.dumps(value)
        lines.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def write_report(obj: dict, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(obj))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_report(path, schema: str | None = None) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvariantViolation(f"{path}: not a valid report ({exc})") from exc
    if schema is not None and obj.get("schema") != schema:
        raise InvariantViolation(f"{path}: expected schema {schema}, found {obj.get('schema')!r}")
    return obj


# --- rate plan -------------------------------------------------------------


def plan_to_dict(plan: RatePlan) -> dict:
    return {
        "schema": PLAN_SCHEMA,
        "target_speedup": plan.target,
        "s_min": plan.s_min,
        "s_max": plan.s_max,
        "feasible": plan.feasible,
        "n_frames": plan.n,
        "output_frames": plan.output_frames,
        "segments": [
            {"start": s.start, "end": s.end, "level": s.importance_level, "speedup": s.speedup}
            for s in plan.segments
        ],
    }


def plan_from_dict(d: dict) -> RatePlan:
    segs = tuple(Segment(s["start"], s["end"], s["level"], s["speedup"]) for s in d["segments"])
    return RatePlan(segs, d["target_speedup"], d["s_min"], d["s_max"], d.get("feasible", True))


# --- selection -------------------------------------------------------------


def selection_to_dict(sel: Selection, stage: str = "final", n_frames: int | None = None) -> dict:
    return {
        "schema": SELECTION_SCHEMA,
        "stage": stage,
        "required_speedup": sel.required_speedup,
        "n_frames": n_frames,
        "count": len(sel),
        "index": [e.index for e in sel.entries],
        "segment": [e.segment for e in sel.entries],
        "provenance": [e.provenance for e in sel.entries],
        "bridges": [
            {
                "left_anchor": b.left_anchor,
                "right_anchor": b.right_anchor,
                "speedup": b.speedup,
                "after_segment": b.after_segment,
            }
            for b in sel.bridges
        ],
    }


def selection_from_dict(d: dict) -> Selection:
    idx, seg, prov = d["index"], d["segment"], d["provenance"]
    if not len(idx) == len(seg) == len(prov):
        raise InvariantViolation("selection arrays have different lengths")
    entries = [Entry(int(i), int(s), p) for i, s, p in zip(idx, seg, prov)]
    bridges = [
        BridgeSegment(b["left_anchor"], b["right_anchor"], b["speedup"], b.get("after_segment", 0))
        for b in d.get("bridges", [])
    ]
    return Selection(entries, d["required_speedup"], bridges)


# --- metrics ---------------------------------------------------------------


def _na(x):
    return NOT_AVAILABLE if x is None else x


def metrics_to_dict(rep: MetricsReport) -> dict:
    out = {"schema": METRICS_SCHEMA}
    out.update({k: _na(v) for k, v in rep.as_dict().items()})
    return out


def metrics_from_dict(d: dict) -> MetricsReport:
    fields = {k: (None if v == NOT_AVAILABLE else v) for k, v in d.items() if k != "schema"}
    return MetricsReport(**fields)


# --- ablation --------------------------------------------------------------


def ablation_to_dict(rows, speedup: float) -> dict:
    return {
        "schema": ABLATION_SCHEMA,
        "required_speedup": speedup,
        "rows": [
            {
                "method": r.method,
                "sampling_seconds": r.sampling_seconds,
                "segment_seconds": r.segment_seconds,
                "metrics": {k: _na(v) for k, v in r.metrics.as_dict().items()},
            }
            for r in rows
        ],
    }


def ensure_dir(path) -> None:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {path}: {exc}") from exc
