"""Semantic fast-forward of first-person videos from per-frame descriptors."""

from .errors import FFWDError
from .gapfill import fill_all, fill_gap, needs_bridge
from .metrics import MetricsReport, evaluate
from .model import (
    BridgeSegment,
    Entry,
    FrameRecord,
    Segment,
    Selection,
    VideoRecord,
    read_container,
    write_container,
)
from .pipeline import PipelineConfig, run_ablation, run_pipeline
from .profile import RatePlan, SemanticProfile, assign_rates, segment_profile
from .sampler import ActivationSolution, SamplerChoice, solve_llc, solve_omp, solve_sc
from .smoother import smooth_segment
from .synth import ScenarioSpec, generate

__version__ = "0.1.0"

__all__ = [
    "ActivationSolution",
    "BridgeSegment",
    "Entry",
    "FFWDError",
    "FrameRecord",
    "MetricsReport",
    "PipelineConfig",
    "RatePlan",
    "SamplerChoice",
    "ScenarioSpec",
    "Segment",
    "Selection",
    "SemanticProfile",
    "VideoRecord",
    "assign_rates",
    "evaluate",
    "fill_all",
    "fill_gap",
    "generate",
    "needs_bridge",
    "read_container",
    "run_ablation",
    "run_pipeline",
    "segment_profile",
    "smooth_segment",
    "solve_llc",
    "solve_omp",
    "solve_sc",
    "write_container",
]
