"""Semantic profile, importance segmentation and per-segment speed-up rates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyProfile, InfeasibleRates, OutOfRangeInput
from .model import Segment, VideoRecord, check_tiling

CENTER_SIGMA = 0.35


def detection_score(detections) -> float:
    """Score one frame from ``(confidence, (x, y), area_fraction)`` detections.

    Each detection contributes its confidence times its area fraction,
    attenuated by a Gaussian of its distance from the image center.
    """
    total = 0.0
    for confidence, center, area in detections:
        x, y = center
        for name, value in (("confidence", confidence), ("x", x), ("y", y), ("area", area)):
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeInput(f"{name} = {value} outside [0, 1]")
        d2 = (x - 0.5) ** 2 + (y - 0.5) ** 2
        total += confidence * math.exp(-d2 / (2 * CENTER_SIGMA**2)) * area
    return total


def moving_average(x: np.ndarray, radius: int) -> np.ndarray:
    """Centered mean over ``[i - radius, i + radius]``, truncated at the ends."""
    x = np.asarray(x, dtype=np.float64)
    if radius <= 0 or x.size == 0:
        return x.copy()
    c = np.concatenate([[0.0], np.cumsum(x)])
    i = np.arange(x.size)
    lo = np.maximum(i - radius, 0)
    hi = np.minimum(i + radius + 1, x.size)
    out = (c[hi] - c[lo]) / (hi - lo)
    # cumsum round-off can step just outside the data range
    return np.clip(out, x.min(), x.max())


@dataclass(frozen=True)
class SemanticProfile:
    raw: np.ndarray
    smoothed: np.ndarray

    @classmethod
    def from_scores(cls, scores, radius: int = 15) -> "SemanticProfile":
        raw = np.asarray(scores, dtype=np.float64)
        return cls(raw=raw, smoothed=moving_average(raw, radius))

    @classmethod
    def from_video(cls, video: VideoRecord, radius: int | None = None) -> "SemanticProfile":
        if radius is None:
            radius = default_smooth_radius(video.fps)
        return cls.from_scores(video.semantic_scores, radius)

    def __len__(self) -> int:
        return self.raw.size


def default_smooth_radius(fps: float) -> int:
    return max(0, int(math.floor(fps / 2.0 + 0.5)))


def otsu_threshold(values) -> float | None:
    """Exact Otsu split over the sorted values.

    Returns the largest value of the lower class, so ``values > t`` is the
    upper class. ``None`` when fewer than two distinct values exist.
    """
    v = np.sort(np.asarray(values, dtype=np.float64))
    n = v.size
    if n < 2 or v[0] == v[-1]:
        return None
    # candidate splits sit between distinct neighbours only
    cuts = np.flatnonzero(v[1:] > v[:-1]) + 1
    csum = np.cumsum(v)
    total = csum[-1]
    n0 = cuts.astype(np.float64)
    n1 = n - n0
    mu0 = csum[cuts - 1] / n0
    mu1 = (total - csum[cuts - 1]) / n1
    between = n0 * n1 * (mu0 - mu1) ** 2
    best = int(np.argmax(between))
    return float(v[cuts[best] - 1])


def _runs(mask: np.ndarray) -> list[list]:
    runs = []
    start = 0
    for i in range(1, mask.size + 1):
        if i == mask.size or mask[i] != mask[start]:
            runs.append([start, i - 1, bool(mask[start])])
            start = i
    return runs


def _merge_short_runs(runs: list[list], min_len: int) -> list[list]:
    """Flip the shortest too-short run into its neighbours until none remain."""
    while len(runs) > 1:
        lengths = [r[1] - r[0] + 1 for r in runs]
        k = int(np.argmin(lengths))
        if lengths[k] >= min_len:
            break
        runs[k][2] = not runs[k][2]
        merged = []
        for r in runs:
            if merged and merged[-1][2] == r[2]:
                merged[-1][1] = r[1]
            else:
                merged.append(list(r))
        runs = merged
    return runs


def segment_profile(profile: SemanticProfile, levels: int = 2, min_len: int = 20) -> list[Segment]:
    """Split the video into semantic / non-semantic segments with importance levels.

    Frames whose smoothed score exceeds the Otsu threshold (mean when Otsu is
    degenerate) are semantic; a score equal to the threshold is not. Runs
    shorter than ``min_len`` are absorbed by their neighbours. Semantic
    segments get levels ``1..levels`` by quantile of their mean raw score.
    Speed-ups are left at 1; see :func:`assign_rates`.
    """
    if len(profile) == 0:
        raise EmptyProfile("cannot segment an empty profile")
    if levels < 1 or min_len < 1:
        raise ValueError("levels and min_len must be >= 1")
    s = profile.smoothed
    tau = otsu_threshold(s)
    if tau is None:
        tau = float(np.mean(s))
    runs = _merge_short_runs(_runs(s > tau), min_len)

    sem = [r for r in runs if r[2]]
    level_of = {}
    if sem:
        means = np.array([profile.raw[a : b + 1].mean() for a, b, _ in sem])
        edges = np.quantile(means, np.arange(1, levels) / levels) if levels > 1 else np.array([])
        for (a, _, _), m in zip(sem, means):
            level_of[a] = 1 + int(np.searchsorted(edges, m, side="left"))
    segments = [Segment(a, b, level_of.get(a, 0) if flag else 0) for a, b, flag in runs]
    check_tiling(segments, len(profile))
    return segments


@dataclass(frozen=True)
class RatePlan:
    segments: tuple[Segment, ...]
    target: float
    s_min: float
    s_max: float
    feasible: bool = True

    @property
    def n(self) -> int:
        return self.segments[-1].end + 1 if self.segments else 0

    @property
    def output_frames(self) -> float:
        return sum(seg.length / seg.speedup for seg in self.segments)

    @property
    def rates(self) -> list[float]:
        return [seg.speedup for seg in self.segments]


def _rates_for(c: float, levels: np.ndarray, s_min: float, s_max: float) -> np.ndarray:
    return np.clip(c / (1.0 + levels), s_min, s_max)


def assign_rates(
    segments: Sequence[Segment],
    target: float,
    s_min: float = 1.0,
    s_max: float | None = None,
    max_iter: int = 200,
) -> RatePlan:
    """Give each segment a speed-up ``c / (1 + level)`` clamped to the bounds.

    The scale ``c`` is found by bisection so that the output length
    ``sum(L_k / s_k)`` matches ``sum(L_k) / target``. Clamped segments keep
    their bound while the remaining ones absorb the residual, which is what
    bisecting on the clamped rate function does.
    """
    if target <= 1:
        raise ValueError(f"target speed-up must be > 1, got {target}")
    if not segments:
        raise ValueError("at least one segment is required")
    if s_max is None:
        s_max = 4.0 * target
    if not 1.0 <= s_min <= s_max:
        raise ValueError(f"bad rate bounds [{s_min}, {s_max}]")

    lengths = np.array([seg.length for seg in segments], dtype=np.float64)
    levels = np.array([seg.importance_level for seg in segments], dtype=np.float64)
    goal = lengths.sum() / target

    def out_len(c):
        return float(np.sum(lengths / _rates_for(c, levels, s_min, s_max)))

    def plan(c, feasible):
        rates = _rates_for(c, levels, s_min, s_max)
        segs = tuple(
            Segment(seg.start, seg.end, seg.importance_level, float(r))
            for seg, r in zip(segments, rates)
        )
        return RatePlan(segs, float(target), float(s_min), float(s_max), feasible)

    lo = s_min  # every rate at s_min or above it: output too long
    hi = s_max * (1.0 + levels.max())  # every rate at s_max: output too short
    if out_len(lo) < goal - 1.0 or out_len(hi) > goal + 1.0:
        best = lo if abs(out_len(lo) - goal) <= abs(out_len(hi) - goal) else hi
        raise InfeasibleRates(
            f"target {target} unreachable within rates [{s_min}, {s_max}]", plan(best, False)
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if out_len(mid) > goal:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    c = hi if abs(out_len(hi) - goal) <= abs(out_len(lo) - goal) else lo
    return plan(c, True)


def plan_video(
    video: VideoRecord,
    target: float = 10.0,
    levels: int = 2,
    min_len: int | None = None,
    smooth_radius: int | None = None,
    s_min: float = 1.0,
    s_max: float | None = None,
) -> RatePlan:
    """Profile, segment and rate a video with the default parameters."""
    if min_len is None:
        min_len = max(1, int(round(2 * target)))
    profile = SemanticProfile.from_video(video, smooth_radius)
    return assign_rates(segment_profile(profile, levels, min_len), target, s_min, s_max)
