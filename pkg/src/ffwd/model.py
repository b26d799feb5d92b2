"""Core domain types and the binary descriptor container.

Container layout (little-endian)::

    magic   4s   b"FFWD"
    version u16  1
    n       u32  frame count
    f       u32  feature dimension
    bins    u16  histogram bins per channel
    thumb_w u16  0 when thumbnails are absent
    thumb_h u16  0 when thumbnails are absent
    fps     f32

followed by the sections ``features (n*f f32)``, ``semantic_scores (n f32)``,
``motion (n f32)``, ``histograms (n*3*bins f32)`` and ``thumbnails
(n*h*w u8)``, the last one omitted when absent.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    BadMagic,
    InvariantViolation,
    IoFailure,
    TruncatedSection,
    VersionUnsupported,
)

MAGIC = b"FFWD"
VERSION = 1
HEADER = struct.Struct("<4sHIIHHHf")
HIST_CHANNELS = 3
HIST_TOL = 1e-6

PROVENANCE = ("sampled", "smoothed", "gapfill")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def quantize(values) -> np.ndarray:
    """Round values to the nearest float32, returned as a fresh float64 array."""
    return np.asarray(values, dtype=np.float32).astype(np.float64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrameRecord:
    index: int
    features: np.ndarray
    semantic_score: float
    motion: float
    histograms: np.ndarray
    thumbnail: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class VideoRecord:
    """Column-oriented storage of every frame of one video.

    Real values are rounded to float32 on construction (the container's storage
    precision) and then held as float64, so ``read(write(v)) == v`` for every
    valid record. Arrays are made read-only.
    """

    features: np.ndarray  # (n, f)
    semantic_scores: np.ndarray  # (n,)
    motion: np.ndarray  # (n,)
    histograms: np.ndarray  # (n, 3, bins)
    thumbnails: Optional[np.ndarray] = None  # (n, h, w) uint8
    fps: float = 30.0

    def __post_init__(self):
        feats = quantize(self.features)
        if feats.ndim == 1:
            feats = feats[:, None]
        object.__setattr__(self, "features", _frozen(feats))
        for name in ("semantic_scores", "motion"):
            object.__setattr__(self, name, _frozen(quantize(getattr(self, name)).reshape(-1)))
        object.__setattr__(self, "histograms", _frozen(quantize(self.histograms)))
        if self.thumbnails is not None:
            thumbs = np.array(self.thumbnails, dtype=np.uint8)
            object.__setattr__(self, "thumbnails", _frozen(thumbs))
        object.__setattr__(self, "fps", float(np.float32(self.fps)))
        validate(self)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def f(self) -> int:
        return self.features.shape[1]

    @property
    def bins(self) -> int:
        return self.histograms.shape[2]

    @property
    def has_thumbnails(self) -> bool:
        return self.thumbnails is not None

    def frame(self, i: int) -> FrameRecord:
        return FrameRecord(
            index=i,
            features=self.features[i],
            semantic_score=float(self.semantic_scores[i]),
            motion=float(self.motion[i]),
            histograms=self.histograms[i],
            thumbnail=None if self.thumbnails is None else self.thumbnails[i],
        )

    @property
    def frames(self) -> list[FrameRecord]:
        return [self.frame(i) for i in range(self.n)]

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, VideoRecord):
            return NotImplemented
        if (self.thumbnails is None) != (other.thumbnails is None):
            return False
        same = (
            self.fps == other.fps
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.semantic_scores, other.semantic_scores)
            and np.array_equal(self.motion, other.motion)
            and np.array_equal(self.histograms, other.histograms)
        )
        if same and self.thumbnails is not None:
            same = np.array_equal(self.thumbnails, other.thumbnails)
        return bool(same)

    __hash__ = None

    @classmethod
    def from_frames(cls, frames: Sequence[FrameRecord], fps: float = 30.0) -> "VideoRecord":
        if not frames:
            raise InvariantViolation("a video needs at least one frame")
        for pos, fr in enumerate(frames):
            if fr.index != pos:
                raise InvariantViolation(
                    f"frame {pos}: index must be {pos}, got {fr.index}"
                )
        thumbs = [fr.thumbnail for fr in frames]
        if any(t is None for t in thumbs) and not all(t is None for t in thumbs):
            raise InvariantViolation("thumbnails must be present on all frames or none")
        dims = {np.asarray(fr.features).shape for fr in frames}
        if len(dims) != 1:
            raise InvariantViolation(f"inconsistent feature dimensions {sorted(dims)}")
        return cls(
            features=np.stack([np.asarray(fr.features, dtype=np.float64) for fr in frames]),
            semantic_scores=[fr.semantic_score for fr in frames],
            motion=[fr.motion for fr in frames],
            histograms=np.stack([np.asarray(fr.histograms, dtype=np.float64) for fr in frames]),
            thumbnails=None if thumbs[0] is None else np.stack(thumbs),
            fps=fps,
        )


def validate(video: VideoRecord) -> None:
    """Raise InvariantViolation naming the first offending frame and field."""
    n = video.features.shape[0]
    if n < 1:
        raise InvariantViolation("a video needs at least one frame")
    if video.features.ndim != 2:
        raise InvariantViolation("features must be an (n, f) array")
    for name in ("semantic_scores", "motion"):
        arr = getattr(video, name)
        if arr.shape != (n,):
            raise InvariantViolation(f"{name} has {arr.shape[0]} entries, expected {n}")
    h = video.histograms
    if h.ndim != 3 or h.shape[0] != n or h.shape[1] != HIST_CHANNELS:
        raise InvariantViolation(f"histograms must be (n, 3, bins), got {h.shape}")
    if video.thumbnails is not None and (
        video.thumbnails.ndim != 3 or video.thumbnails.shape[0] != n
    ):
        raise InvariantViolation(f"thumbnails must be (n, h, w), got {video.thumbnails.shape}")

    def first_bad(mask: np.ndarray) -> int:
        return int(np.flatnonzero(mask)[0])

    bad = ~np.isfinite(video.features).all(axis=1)
    if bad.any():
        raise InvariantViolation(f"frame {first_bad(bad)}: features not finite")
    for name, label in (("semantic_scores", "semantic_score"), ("motion", "motion")):
        arr = getattr(video, name)
        bad = ~(np.isfinite(arr) & (arr >= 0))
        if bad.any():
            i = first_bad(bad)
            raise InvariantViolation(f"frame {i}: {label} = {arr[i]} must be finite and >= 0")
    bad = ~(np.isfinite(h) & (h >= 0)).all(axis=(1, 2))
    if bad.any():
        raise InvariantViolation(f"frame {first_bad(bad)}: histograms has a negative or non-finite bin")
    sums = h.sum(axis=2)
    bad = (np.abs(sums - 1.0) > HIST_TOL).any(axis=1)
    if bad.any():
        i = first_bad(bad)
        raise InvariantViolation(
            f"frame {i}: histograms channel sums {sums[i].tolist()} differ from 1"
        )


@dataclass(frozen=True)
class Segment:
    start: int
    end: int  # inclusive
    importance_level: int = 0
    speedup: float = 1.0

    def __post_init__(self):
        if self.start > self.end:
            raise InvariantViolation(f"segment start {self.start} > end {self.end}")
        if self.importance_level < 0:
            raise InvariantViolation("importance_level must be >= 0")

    @property
    def length(self) -> int:
        return self.end - self.start + 1


def check_tiling(segments: Sequence[Segment], n: int) -> None:
    pos = 0
    for k, seg in enumerate(segments):
        if seg.start != pos:
            raise InvariantViolation(f"segment {k} starts at {seg.start}, expected {pos}")
        pos = seg.end + 1
    if pos != n:
        raise InvariantViolation(f"segments cover [0, {pos - 1}], expected [0, {n - 1}]")


@dataclass(frozen=True)
class Entry:
    index: int
    segment: int
    provenance: str = "sampled"


@dataclass(frozen=True)
class BridgeSegment:
    """A segment spanning the gap between two consecutive segments A and B."""

    left_anchor: int
    right_anchor: int
    speedup: float
    after_segment: int = 0  # id of segment A

    def __post_init__(self):
        if self.left_anchor >= self.right_anchor:
            raise InvariantViolation("bridge anchors must satisfy left < right")

    @classmethod
    def between(cls, left: int, right: int, speedup_a: float, speedup_b: float, after_segment: int = 0):
        return cls(left, right, (speedup_a + speedup_b) / 2.0, after_segment)


@dataclass(frozen=True)
class Selection:
    entries: tuple[Entry, ...]
    required_speedup: float
    bridges: tuple[BridgeSegment, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "bridges", tuple(self.bridges))
        idx = [e.index for e in self.entries]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvariantViolation("selection indices must be strictly increasing")
        for e in self.entries:
            if e.provenance not in PROVENANCE:
                raise InvariantViolation(f"unknown provenance {e.provenance!r}")

    @property
    def indices(self) -> np.ndarray:
        return np.array([e.index for e in self.entries], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Entry]:
        return iter(self.entries)

    def check_against(self, video: VideoRecord) -> None:
        if self.entries and not (0 <= self.entries[0].index and self.entries[-1].index < video.n):
            raise InvariantViolation("selection references frames outside the video")


def merge_entries(entries) -> list[Entry]:
    """Sort entries by frame index, keeping the first entry seen per index."""
    seen: dict[int, Entry] = {}
    for e in entries:
        seen.setdefault(e.index, e)
    return [seen[i] for i in sorted(seen)]


# --------------------------------------------------------------------------
# container I/O
# --------------------------------------------------------------------------


def container_size(n: int, f: int, bins: int, thumb_w: int = 0, thumb_h: int = 0) -> int:
    return HEADER.size + 4 * (n * f + 2 * n + n * HIST_CHANNELS * bins) + n * thumb_w * thumb_h


def encode_container(video: VideoRecord) -> bytes:
    n, f, bins = video.n, video.f, video.bins
    if video.thumbnails is not None:
        thumb_h, thumb_w = video.thumbnails.shape[1:]
    else:
        thumb_h = thumb_w = 0
    parts = [
        HEADER.pack(MAGIC, VERSION, n, f, bins, thumb_w, thumb_h, video.fps),
        video.features.astype("<f4").tobytes(),
        video.semantic_scores.astype("<f4").tobytes(),
        video.motion.astype("<f4").tobytes(),
        video.histograms.astype("<f4").tobytes(),
    ]
    if video.thumbnails is not None:
        parts.append(video.thumbnails.astype(np.uint8).tobytes())
    return b"".join(parts)


def decode_container(buf: bytes) -> VideoRecord:
    if len(buf) < len(MAGIC) or buf[: len(MAGIC)] != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, got {bytes(buf[:4])!r}")
    if len(buf) < HEADER.size:
        raise TruncatedSection(f"header needs {HEADER.size} bytes, file has {len(buf)}")
    _, version, n, f, bins, thumb_w, thumb_h, fps = HEADER.unpack_from(buf, 0)
    if version != VERSION:
        raise VersionUnsupported(f"container version {version} is not supported")
    if n < 1:
        raise InvariantViolation("container declares zero frames")
    if (thumb_w == 0) != (thumb_h == 0):
        raise InvariantViolation("thumbnail width and height must both be zero or both nonzero")

    sections = [
        ("features", "<f4", n * f),
        ("semantic_scores", "<f4", n),
        ("motion", "<f4", n),
        ("histograms", "<f4", n * HIST_CHANNELS * bins),
    ]
    if thumb_w:
        sections.append(("thumbnails", "u1", n * thumb_h * thumb_w))

    out = {}
    offset = HEADER.size
    for name, dtype, count in sections:
        nbytes = count * np.dtype(dtype).itemsize
        if offset + nbytes > len(buf):
            raise TruncatedSection(
                f"section {name} needs {nbytes} bytes at offset {offset}, "
                f"only {len(buf) - offset} remain"
            )
        out[name] = np.frombuffer(buf, dtype=dtype, count=count, offset=offset)
        offset += nbytes
    if offset != len(buf):
        raise TruncatedSection(
            f"{len(buf) - offset} trailing bytes after the last section"
        )

    return VideoRecord(
        features=out["features"].reshape(n, f),
        semantic_scores=out["semantic_scores"],
        motion=out["motion"],
        histograms=out["histograms"].reshape(n, HIST_CHANNELS, bins),
        thumbnails=out["thumbnails"].reshape(n, thumb_h, thumb_w) if thumb_w else None,
        fps=fps,
    )


def read_container(path) -> VideoRecord:
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return decode_container(buf)


def write_container(video: VideoRecord, path) -> None:
    data = encode_container(video)
    tmp = f"{os.fspath(path)}.tmp"
    try:
        with open(tmp, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


