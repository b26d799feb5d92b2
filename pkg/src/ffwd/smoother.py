"""Frame-transition smoothing: insert frames into the shakiest transitions."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BinCountMismatch, IndexOutOfRange, NoInteriorFrame, TooFewFrames
from .model import Entry, VideoRecord, merge_entries, round_half_up

log = logging.getLogger(__name__)


def emd_histograms(hx, hy) -> float:
    """Mean over channels of the 1-D EMD with unit ground distance between bins.

    For normalized 1-D histograms the EMD equals the L1 distance between
    their cumulative distributions.
    """
    hx = np.asarray(hx, dtype=np.float64)
    hy = np.asarray(hy, dtype=np.float64)
    if hx.shape != hy.shape:
        raise BinCountMismatch(f"histogram shapes differ: {hx.shape} vs {hy.shape}")
    hx = np.atleast_2d(hx)
    hy = np.atleast_2d(hy)
    per_channel = np.abs(np.cumsum(hx - hy, axis=-1)).sum(axis=-1)
    return float(per_channel.mean())


def emd_many(h_ref: np.ndarray, hs: np.ndarray) -> np.ndarray:
    """EMD between one (3, B) histogram and a stack of (k, 3, B) histograms."""
    return np.abs(np.cumsum(hs - h_ref, axis=-1)).sum(axis=-1).mean(axis=-1)


@dataclass(frozen=True)
class TransitionCost:
    ac: float
    gap_penalty: float

    @property
    def instability(self) -> float:
        return self.ac * self.gap_penalty


def transition_cost(video: VideoRecord, x: int, y: int, speedup: float) -> TransitionCost:
    if not (0 <= x < video.n and 0 <= y < video.n):
        raise IndexOutOfRange(f"frames ({x}, {y}) outside [0, {video.n - 1}]")
    if x >= y:
        raise IndexOutOfRange(f"transition needs x < y, got ({x}, {y})")
    return TransitionCost(
        emd_histograms(video.histograms[x], video.histograms[y]), float(y - x - speedup)
    )


def instability(video: VideoRecord, x: int, y: int, speedup: float) -> float:
    """Appearance change times the deviation of the jump ``y - x`` from ``speedup``."""
    return transition_cost(video, x, y, speedup).instability


def transition_instabilities(video: VideoRecord, indices: Sequence[int], speedup: float) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size < 2:
        return np.zeros(0)
    h = video.histograms
    ac = np.abs(np.cumsum(h[idx[1:]] - h[idx[:-1]], axis=-1)).sum(axis=-1).mean(axis=-1)
    return ac * ((idx[1:] - idx[:-1]) - speedup)


def _indices(entries) -> list[int]:
    return [e.index if isinstance(e, Entry) else int(e) for e in entries]


def shakiest_transition(video: VideoRecord, entries, speedup: float, require_interior: bool = False) -> int:
    """Position ``i`` of the pair (entries[i], entries[i+1]) with the largest instability.

    Ties go to the lowest position. With ``require_interior`` only pairs that
    have at least one frame between them compete; -1 if there are none.
    """
    idx = _indices(entries)
    if len(idx) < 2:
        raise TooFewFrames("need at least two selected frames")
    costs = transition_instabilities(video, idx, speedup)
    if require_interior:
        gaps = np.diff(idx)
        costs = np.where(gaps >= 2, costs, -np.inf)
        if not np.isfinite(costs).any():
            return -1
    return int(np.argmax(costs))


def insertion_costs(video: VideoRecord, left: int, right: int, speedup: float) -> np.ndarray:
    """``I(left, j)^2 + I(j, right)^2`` for every ``j`` strictly between."""
    js = np.arange(left + 1, right)
    h = video.histograms
    into = emd_many(h[left], h[js]) * ((js - left) - speedup)
    out = emd_many(h[right], h[js]) * ((right - js) - speedup)
    return into**2 + out**2


def best_insertion(video: VideoRecord, left: int, right: int, speedup: float) -> int:
    if not (0 <= left < right < video.n):
        raise IndexOutOfRange(f"bad transition ({left}, {right})")
    if right - left < 2:
        raise NoInteriorFrame(f"no frame strictly between {left} and {right}")
    return left + 1 + int(np.argmin(insertion_costs(video, left, right, speedup)))


def smooth_entries(
    video: VideoRecord,
    entries: Sequence[Entry],
    target_count: int,
    speedup: float,
    segment_id: int = 0,
    provenance: str = "smoothed",
    fixed: Sequence[int] = (),
    trace: bool = False,
) -> list[Entry]:
    """Insert frames until ``target_count`` non-fixed entries exist.

    ``fixed`` frames take part in the transitions but are neither counted nor
    returned (used by gap filling for the anchors).
    """
    fixed_set = set(fixed)
    current = merge_entries(list(entries) + [Entry(i, segment_id, "sampled") for i in fixed])
    idx = [e.index for e in current]
    count = sum(1 for i in idx if i not in fixed_set)
    if count >= target_count or len(idx) < 2:
        return [e for e in current if e.index not in fixed_set]

    h = video.histograms
    costs = list(transition_instabilities(video, idx, speedup))
    gaps = np.diff(idx)
    costs = [c if g >= 2 else -np.inf for c, g in zip(costs, gaps)]
    inserted: list[Entry] = []

    def pair_cost(a: int, b: int) -> float:
        if b - a < 2:
            return -np.inf
        return float(emd_many(h[a], h[b][None])[0] * ((b - a) - speedup))

    while count < target_count:
        i = int(np.argmax(costs))
        if not np.isfinite(costs[i]):
            break
        left, right = idx[i], idx[i + 1]
        j = best_insertion(video, left, right, speedup)
        if trace:
            log.debug("insert %d between %d and %d (I=%.4g)", j, left, right, costs[i])
        idx.insert(i + 1, j)
        costs[i : i + 1] = [pair_cost(left, j), pair_cost(j, right)]
        inserted.append(Entry(j, segment_id, provenance))
        count += 1
    out = merge_entries(list(current) + inserted)
    return [e for e in out if e.index not in fixed_set]


def smoothing_target(n_seg: int, speedup: float) -> int:
    return min(n_seg, max(1, round_half_up(n_seg / speedup)))


def smooth_segment(
    video: VideoRecord,
    segment,
    entries: Sequence[Entry],
    target_count: int | None = None,
    segment_id: int = 0,
) -> list[Entry]:
    """Bring one segment's selection up to ``round(n_seg / speedup)`` frames."""
    if target_count is None:
        target_count = smoothing_target(segment.length, segment.speedup)
    return smooth_entries(
        video, entries, target_count, segment.speedup, segment_id, trace=log.isEnabledFor(logging.DEBUG)
    )
