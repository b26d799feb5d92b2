"""Bridge visual gaps and abrupt speed-up changes between consecutive segments."""

from __future__ import annotations

from typing import Sequence

from .model import BridgeSegment, Entry, Selection, VideoRecord, merge_entries
from .sampler import DEFAULT_LAMBDA_SCALE, sample_range
from .smoother import instability, smoothing_target, smooth_entries, transition_instabilities

__all__ = ["BridgeSegment", "needs_bridge", "fill_gap", "fill_all", "rates_with_bridges"]


def mean_instability(video: VideoRecord, entries: Sequence[Entry], speedup: float) -> float:
    if len(entries) < 2:
        return 0.0
    return float(transition_instabilities(video, [e.index for e in entries], speedup).mean())


def needs_bridge(video: VideoRecord, a_entries, b_entries, speedup_a: float) -> bool:
    """True when the A->B boundary is shakier than A's average transition."""
    if not a_entries or not b_entries:
        return False
    boundary = instability(video, a_entries[-1].index, b_entries[0].index, speedup_a)
    return boundary > mean_instability(video, a_entries, speedup_a)


def fill_gap(
    video: VideoRecord,
    bridge: BridgeSegment,
    method: str = "llc",
    spf: int = 2,
    lambda_scale: float = DEFAULT_LAMBDA_SCALE,
) -> list[Entry]:
    """Sample and smooth the frames strictly between the bridge anchors.

    The anchors take part in the smoothing transitions but are not returned.
    """
    start, end = bridge.left_anchor + 1, bridge.right_anchor - 1
    if end < start:
        return []
    seg_id = bridge.after_segment
    sampled = sample_range(
        video, start, end, bridge.speedup, method, spf, lambda_scale, seg_id, "gapfill"
    ).entries
    target = smoothing_target(end - start + 1, bridge.speedup)
    filled = smooth_entries(
        video,
        sampled,
        target,
        bridge.speedup,
        seg_id,
        provenance="gapfill",
        fixed=(bridge.left_anchor, bridge.right_anchor),
    )
    return [Entry(e.index, seg_id, "gapfill") for e in filled]


def fill_all(
    video: VideoRecord,
    plan,
    per_segment: Sequence[Sequence[Entry]],
    method: str = "llc",
    spf: int = 2,
    lambda_scale: float = DEFAULT_LAMBDA_SCALE,
    enabled: bool = True,
) -> Selection:
    """Bridge every boundary that needs it and merge everything into one Selection.

    Single pass: bridges are decided from the per-segment selections only and
    never trigger further bridges.
    """
    segments = plan.segments
    if len(per_segment) != len(segments):
        raise ValueError(f"{len(per_segment)} selections for {len(segments)} segments")
    entries = [e for seg_entries in per_segment for e in seg_entries]
    bridges = []
    if enabled:
        for k in range(len(segments) - 1):
            a, b = per_segment[k], per_segment[k + 1]
            if not (a and b):
                continue
            s_a, s_b = segments[k].speedup, segments[k + 1].speedup
            if not needs_bridge(video, a, b, s_a):
                continue
            left, right = a[-1].index, b[0].index
            bridge = BridgeSegment.between(left, right, s_a, s_b, after_segment=k)
            bridges.append(bridge)
            entries.extend(fill_gap(video, bridge, method, spf, lambda_scale))
    return Selection(merge_entries(entries), plan.target, tuple(bridges))


def rates_with_bridges(plan, bridges: Sequence[BridgeSegment] = ()) -> list[float]:
    """Segment rates in time order with each bridge's rate slotted after its segment A."""
    by_segment: dict[int, list[float]] = {}
    for br in bridges:
        by_segment.setdefault(br.after_segment, []).append(br.speedup)
    out = []
    for k, seg in enumerate(plan.segments):
        out.append(seg.speedup)
        out.extend(by_segment.get(k, []))
    return out

