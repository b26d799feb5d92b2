"""Evaluation metrics for a frame selection."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import TooFewFrames, TooFewSegments
from .model import Selection, VideoRecord

DEFAULT_WINDOW = 4


def _indices(selection) -> np.ndarray:
    if isinstance(selection, Selection):
        return selection.indices
    return np.asarray([getattr(e, "index", e) for e in selection], dtype=np.int64)


def discontinuity(selection, required_speedup: float) -> float:
    """RMS deviation of consecutive jumps from the required speed-up.

    The sum of squared deviations runs over the ``m - 1`` jumps but is
    divided by the frame count ``m``.
    """
    idx = _indices(selection)
    m = idx.size
    if m < 2:
        raise TooFewFrames("discontinuity needs at least two selected frames")
    dev = np.diff(idx) - required_speedup
    return math.sqrt(float(np.sum(dev**2)) / m)


def instability_metric(video: VideoRecord, selection, window: int = DEFAULT_WINDOW) -> Optional[float]:
    """Mean over sliding windows of the summed per-pixel standard deviation.

    Windows hold ``window`` consecutive selected frames (stride 1); a shorter
    selection forms a single window. ``None`` when the video has no
    thumbnails.
    """
    if not video.has_thumbnails:
        return None
    idx = _indices(selection)
    if idx.size < 2:
        return 0.0
    thumbs = video.thumbnails[idx].astype(np.float64)
    k = min(window, idx.size)
    windows = np.lib.stride_tricks.sliding_window_view(thumbs, k, axis=0)
    return float(windows.std(axis=-1).sum(axis=(1, 2)).mean())


def semantic_retained(video: VideoRecord, selection) -> float:
    """Selected score mass over the best mass any equally sized selection could get."""
    idx = _indices(selection)
    m = idx.size
    if m < 1:
        raise TooFewFrames("semantic retention needs a non-empty selection")
    scores = video.semantic_scores
    best = float(np.sort(scores)[::-1][:m].sum())
    got = float(scores[idx].sum())
    if best == 0.0:
        return 1.0
    return min(1.0, got / best)


def achieved_speedup(n: int, m: int) -> float:
    return n / m


def speedup_deviation(selection, required_speedup: float, n: int) -> float:
    m = len(_indices(selection))
    if m < 1:
        raise TooFewFrames("speed-up needs a non-empty selection")
    return abs(n / m - required_speedup)


def transition_smoothness(rates: Sequence[float]) -> float:
    """Mean squared difference between consecutive segment rates."""
    r = np.asarray(rates, dtype=np.float64)
    if r.size < 2:
        raise TooFewSegments("need at least two segments")
    return float(np.mean(np.diff(r) ** 2))


def uniform_selection(n: int, m: int) -> np.ndarray:
    """``m`` evenly spaced frame indices covering ``[0, n)``."""
    m = max(1, min(int(m), n))
    return np.floor(np.arange(m) * (n / m)).astype(np.int64)


@dataclass(frozen=True)
class MetricsReport:
    instability: Optional[float]
    speedup_deviation: float
    semantic_retained: float
    discontinuity: Optional[float]
    transition_smoothness: Optional[float]
    achieved_speedup: float
    required_speedup: float
    n_frames: int
    n_selected: int

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(
    video: VideoRecord,
    selection: Selection,
    rates: Sequence[float] = (),
    required_speedup: Optional[float] = None,
    window: int = DEFAULT_WINDOW,
) -> MetricsReport:
    """All metrics at once; degenerate inputs report ``None`` rather than raise."""
    s_d = selection.required_speedup if required_speedup is None else required_speedup
    m = len(selection)
    return MetricsReport(
        instability=instability_metric(video, selection, window),
        speedup_deviation=speedup_deviation(selection, s_d, video.n),
        semantic_retained=semantic_retained(video, selection),
        discontinuity=discontinuity(selection, s_d) if m >= 2 else None,
        transition_smoothness=transition_smoothness(rates) if len(rates) >= 2 else None,
        achieved_speedup=achieved_speedup(video.n, m),
        required_speedup=float(s_d),
        n_frames=video.n,
        n_selected=m,
    )
