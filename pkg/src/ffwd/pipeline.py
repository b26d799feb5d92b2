"""Stage functions and the end-to-end fast-forward pipeline."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .gapfill import fill_all, rates_with_bridges
from .metrics import DEFAULT_WINDOW, MetricsReport, evaluate
from .model import Entry, Selection, VideoRecord, merge_entries
from .profile import RatePlan, plan_video
from .sampler import DEFAULT_LAMBDA_SCALE, METHODS, sample_range
from .smoother import smooth_segment


@dataclass(frozen=True)
class PipelineConfig:
    input: Optional[str] = None
    output: Optional[str] = None
    speedup: float = 10.0
    sampler: str = "llc"
    spf: int = 2
    fill: bool = True
    levels: int = 2
    min_seg_len: Optional[int] = None
    smooth_radius: Optional[int] = None
    metric_window: int = DEFAULT_WINDOW
    lambda_scale: float = DEFAULT_LAMBDA_SCALE
    s_min: float = 1.0
    s_max: Optional[float] = None
    threads: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.speedup <= 1:
            raise ValueError(f"speed-up must be > 1, got {self.speedup}")
        if self.spf < 1:
            raise ValueError(f"SpF must be >= 1, got {self.spf}")
        if self.sampler not in METHODS:
            raise ValueError(f"unknown sampler {self.sampler!r}")


def worker_count(requested: Optional[int] = None) -> int:
    env = os.environ.get("FFWD_THREADS")
    if env:
        return max(1, int(env))
    if requested:
        return max(1, int(requested))
    return os.cpu_count() or 1


def _map(fn, items, threads: Optional[int]):
    items = list(items)
    workers = min(worker_count(threads), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def make_plan(video: VideoRecord, cfg: PipelineConfig) -> RatePlan:
    return plan_video(
        video,
        target=cfg.speedup,
        levels=cfg.levels,
        min_len=cfg.min_seg_len,
        smooth_radius=cfg.smooth_radius,
        s_min=cfg.s_min,
        s_max=cfg.s_max,
    )


@dataclass
class SampledStage:
    per_segment: list[list[Entry]]
    solve_seconds: list[float]

    @property
    def sampling_seconds(self) -> float:
        return float(sum(self.solve_seconds))


def sample_stage(video: VideoRecord, plan: RatePlan, cfg: PipelineConfig) -> SampledStage:
    def one(k):
        seg = plan.segments[k]
        res = sample_range(
            video, seg.start, seg.end, seg.speedup, cfg.sampler, cfg.spf, cfg.lambda_scale, k
        )
        return res.entries, res.solve_seconds

    results = _map(one, range(len(plan.segments)), cfg.threads)
    return SampledStage([r[0] for r in results], [r[1] for r in results])


def smooth_stage(
    video: VideoRecord, plan: RatePlan, per_segment: Sequence[Sequence[Entry]], cfg: PipelineConfig
) -> list[list[Entry]]:
    def one(k):
        return smooth_segment(video, plan.segments[k], per_segment[k], segment_id=k)

    return _map(one, range(len(plan.segments)), cfg.threads)


def fill_stage(
    video: VideoRecord, plan: RatePlan, per_segment: Sequence[Sequence[Entry]], cfg: PipelineConfig
) -> Selection:
    return fill_all(
        video, plan, per_segment, cfg.sampler, cfg.spf, cfg.lambda_scale, enabled=cfg.fill
    )


def metrics_stage(video: VideoRecord, plan: RatePlan, selection: Selection, cfg: PipelineConfig) -> MetricsReport:
    rates = rates_with_bridges(plan, selection.bridges)
    return evaluate(video, selection, rates, cfg.speedup, cfg.metric_window)


def group_by_segment(selection: Selection, n_segments: int) -> list[list[Entry]]:
    groups: list[list[Entry]] = [[] for _ in range(n_segments)]
    for e in selection.entries:
        if not 0 <= e.segment < n_segments:
            raise ValueError(f"entry {e.index} names unknown segment {e.segment}")
        groups[e.segment].append(e)
    return groups


def flatten(per_segment: Sequence[Sequence[Entry]], speedup: float) -> Selection:
    return Selection(merge_entries(e for seg in per_segment for e in seg), speedup)


@dataclass
class PipelineResult:
    plan: RatePlan
    sampled: SampledStage
    smoothed: list[list[Entry]]
    selection: Selection
    metrics: MetricsReport
    seconds: dict = field(default_factory=dict)


def run_pipeline(video: VideoRecord, cfg: PipelineConfig, plan: Optional[RatePlan] = None) -> PipelineResult:
    """profile -> rates -> sample -> smooth -> fill -> metrics."""
    timings = {}
    t0 = time.perf_counter()
    if plan is None:
        plan = make_plan(video, cfg)
    timings["plan"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    sampled = sample_stage(video, plan, cfg)
    timings["sample"] = time.perf_counter() - t0
    timings["solver"] = sampled.sampling_seconds
    t0 = time.perf_counter()
    smoothed = smooth_stage(video, plan, sampled.per_segment, cfg)
    timings["smooth"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    selection = fill_stage(video, plan, smoothed, cfg)
    timings["fill"] = time.perf_counter() - t0
    report = metrics_stage(video, plan, selection, cfg)
    return PipelineResult(plan, sampled, smoothed, selection, report, timings)


@dataclass
class AblationRow:
    method: str
    sampling_seconds: float
    metrics: MetricsReport
    segment_seconds: list[float] = field(default_factory=list)


def run_ablation(
    video: VideoRecord,
    cfg: PipelineConfig,
    methods: Sequence[str] = METHODS,
    repeats: int = 1,
) -> list[AblationRow]:
    """Run the pipeline once per sampler on the same rate plan.

    ``sampling_seconds`` is the summed solver wall-time of the per-segment
    sampling stage; with ``repeats > 1`` the fastest repetition is kept.
    """
    if len(methods) < 2:
        raise ValueError("an ablation needs at least two sampler methods")
    plan = make_plan(video, cfg)
    rows = []
    for method in methods:
        mcfg = replace(cfg, sampler=method)
        best = None
        for _ in range(max(1, repeats)):
            res = run_pipeline(video, mcfg, plan)
            if best is None or res.sampled.sampling_seconds < best.sampled.sampling_seconds:
                best = res
        rows.append(
            AblationRow(method, best.sampled.sampling_seconds, best.metrics, list(best.sampled.solve_seconds))
        )
    return rows


def format_ablation(rows: Sequence[AblationRow]) -> str:
    def fmt(x, spec):
        return "NotAvailable" if x is None else format(x, spec)

    header = ["method", "time_s", "semantic", "instability", "discontinuity", "speedup_dev", "selected"]
    lines = [header]
    for r in rows:
        m = r.metrics
        lines.append(
            [
                r.method,
                fmt(r.sampling_seconds, ".4f"),
                fmt(m.semantic_retained, ".4f"),
                fmt(m.instability, ".2f"),
                fmt(m.discontinuity, ".3f"),
                fmt(m.speedup_deviation, ".3f"),
                str(m.n_selected),
            ]
        )
    widths = [max(len(row[i]) for row in lines) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in lines) + "\n"
