"""Seeded synthetic first-person scenarios and independent verification oracles.

Scenarios mimic the structure of an annotated egocentric dataset: a fixed
fraction of frames sit on semantic plateaus, and shake bursts make features,
color histograms and thumbnails jump.
"""

from __future__ import annotations

import configparser
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, TooLarge
from .model import VideoRecord, round_half_up
from .rng import CounterRNG

NOISE_SIGMA = 0.05
NOISE_CLIP = 3 * NOISE_SIGMA
BURST_AMPLITUDE = (1.0, 4.0)


@dataclass(frozen=True)
class ScenarioSpec:
    n: int = 1000
    f: int = 32
    semantic_fraction: float = 0.5
    shake_bursts: tuple[tuple[int, int, float], ...] = ()
    seed: int = 0
    bins: int = 16
    thumb_size: int = 16  # 0 disables thumbnails
    fps: float = 30.0

    def __post_init__(self):
        object.__setattr__(
            self, "shake_bursts", tuple((int(s), int(l), float(a)) for s, l, a in self.shake_bursts)
        )
        if self.n < 1 or self.f < 1 or self.bins < 1 or self.thumb_size < 0:
            raise InvalidSpec("n, f and bins must be >= 1; thumb_size >= 0")
        if not 0.0 <= self.semantic_fraction < 1.0:
            raise InvalidSpec(f"semantic_fraction {self.semantic_fraction} outside [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")
        for start, length, amp in self.shake_bursts:
            if start < 0 or length < 1 or start + length > self.n or amp < 0:
                raise InvalidSpec(f"shake burst {(start, length, amp)} outside [0, {self.n})")


@dataclass(frozen=True)
class ScenarioTruth:
    plateau_mask: np.ndarray
    plateaus: tuple[tuple[int, int, float], ...]  # (start, end inclusive, height)
    burst_mask: np.ndarray = field(repr=False, default=None)


def _composition(rng: CounterRNG, total: int, parts: int, minimum: np.ndarray) -> np.ndarray:
    """Split ``total`` into ``parts`` integers, part ``i`` at least ``minimum[i]``."""
    free = total - int(minimum.sum())
    weights = rng.uniform(parts, 0.5, 1.5)
    share = np.floor(free * weights / weights.sum()).astype(np.int64)
    share[0] += free - int(share.sum())
    return minimum + share


def _plateaus(rng: CounterRNG, n: int, fraction: float):
    total = round_half_up(fraction * n)
    if total == 0:
        return []
    k = 1 + rng.integers(0, 3)
    k = max(1, min(k, total, n - total + 1))
    lengths = _composition(rng, total, k, np.ones(k, dtype=np.int64))
    gap_min = np.ones(k + 1, dtype=np.int64)
    gap_min[0] = gap_min[-1] = 0
    gaps = _composition(rng, n - total, k + 1, gap_min)
    heights = rng.uniform(k, 0.5, 1.0)
    out = []
    pos = 0
    for i in range(k):
        pos += int(gaps[i])
        out.append((pos, pos + int(lengths[i]) - 1, float(heights[i])))
        pos += int(lengths[i])
    return out


def generate_with_truth(spec: ScenarioSpec) -> tuple[VideoRecord, ScenarioTruth]:
    root = CounterRNG(spec.seed)
    n, f = spec.n, spec.f

    burst = np.zeros(n)
    for start, length, amp in spec.shake_bursts:
        burst[start : start + length] = np.maximum(burst[start : start + length], amp)
    in_burst = burst > 0

    # features: smooth random walk, bigger steps inside bursts
    frng = root.split("features")
    steps = frng.normal((n, f), 0.1) * (1.0 + burst)[:, None]
    steps[0] = frng.normal(f, 1.0)
    features = np.cumsum(steps, axis=0)
    motion = np.zeros(n)
    if n > 1:
        motion[1:] = np.linalg.norm(np.diff(features, axis=0), axis=1)
        motion[0] = motion[1]

    # semantic score: plateaus plus clipped Gaussian noise
    plateaus = _plateaus(root.split("plateaus"), n, spec.semantic_fraction)
    level = np.zeros(n)
    for a, b, height in plateaus:
        level[a : b + 1] = height
    noise = np.clip(root.split("noise").normal(n, NOISE_SIGMA), -NOISE_CLIP, NOISE_CLIP)
    scores = np.maximum(level + noise, 0.0)

    # color histograms: softmax of slowly drifting logits, jumps in bursts
    hrng = root.split("histograms")
    logit_steps = hrng.normal((n, 3, spec.bins), 0.03)
    logit_steps += hrng.normal((n, 3, spec.bins), 0.4) * burst[:, None, None]
    logit_steps[0] = hrng.normal((3, spec.bins), 1.0)
    logits = np.cumsum(logit_steps, axis=0)
    logits -= logits.max(axis=2, keepdims=True)
    hist = np.exp(logits)
    hist /= hist.sum(axis=2, keepdims=True)
    # float32 storage: renormalize after rounding so channel sums stay near 1
    hist = hist.astype(np.float32).astype(np.float64)
    hist /= hist.sum(axis=2, keepdims=True)

    thumbs = None
    if spec.thumb_size:
        trng = root.split("thumbnails")
        size = spec.thumb_size
        angle = trng.uniform(None, 0.0, math.pi)
        phase = np.cumsum(np.full(n, 0.05) + trng.normal(n, 0.01))
        phase += trng.normal(n, 0.6) * burst
        yy, xx = np.mgrid[0:size, 0:size] / size
        proj = xx * math.cos(angle) + yy * math.sin(angle)
        img = 128.0 + 60.0 * np.sin(2 * math.pi * proj[None] + phase[:, None, None])
        img += trng.normal((n, size, size), 2.0) * (1.0 + 4.0 * burst)[:, None, None]
        thumbs = np.clip(np.rint(img), 0, 255).astype(np.uint8)

    video = VideoRecord(
        features=features,
        semantic_scores=scores,
        motion=motion,
        histograms=hist,
        thumbnails=thumbs,
        fps=spec.fps,
    )
    truth = ScenarioTruth(level > 0, tuple(plateaus), in_burst)
    return video, truth


def generate(spec: ScenarioSpec) -> VideoRecord:
    return generate_with_truth(spec)[0]


def random_bursts(seed: int, n: int, count: Optional[int] = None) -> tuple:
    rng = CounterRNG(seed).split("bursts")
    if count is None:
        count = 2 + rng.integers(0, 3)
    bursts = []
    for _ in range(count):
        length = min(n, 10 + rng.integers(0, max(1, n // 25)))
        start = rng.integers(0, n - length + 1)
        bursts.append((start, length, round(rng.uniform(None, *BURST_AMPLITUDE), 3)))
    return tuple(sorted(bursts))


def asd_style_spec(seed: int, semantic_fraction: float, n: int = 2000, f: int = 32, **kw) -> ScenarioSpec:
    """A scenario shaped like one annotated-dataset video of the given class."""
    return ScenarioSpec(
        n=n,
        f=f,
        semantic_fraction=semantic_fraction,
        shake_bursts=random_bursts(seed, n),
        seed=seed,
        **kw,
    )


# --------------------------------------------------------------------------
# config files
# --------------------------------------------------------------------------


def parse_bursts(text: str) -> tuple:
    bursts = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        try:
            start, length, amp = item.split(":")
            bursts.append((int(start), int(length), float(amp)))
        except ValueError as exc:
            raise InvalidSpec(f"bad shake burst {item!r}; expected start:length:amplitude") from exc
    return tuple(bursts)


def format_bursts(bursts) -> str:
    return ", ".join(f"{s}:{l}:{a!r}" for s, l, a in bursts)


def read_spec(path) -> ScenarioSpec:
    """Read a ``[scenario]`` section of ``key = value`` lines."""
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise InvalidSpec(f"cannot read scenario config {path}")
    if "scenario" not in cp:
        raise InvalidSpec(f"{path}: missing [scenario] section")
    sec = cp["scenario"]
    known = {"n", "f", "semantic_fraction", "shake_bursts", "seed", "bins", "thumb_size", "fps"}
    unknown = set(sec) - known
    if unknown:
        raise InvalidSpec(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return ScenarioSpec(
            n=sec.getint("n", 1000),
            f=sec.getint("f", 32),
            semantic_fraction=sec.getfloat("semantic_fraction", 0.5),
            shake_bursts=parse_bursts(sec.get("shake_bursts", "")),
            seed=int(sec.get("seed", "0"), 0),
            bins=sec.getint("bins", 16),
            thumb_size=sec.getint("thumb_size", 16),
            fps=sec.getfloat("fps", 30.0),
        )
    except ValueError as exc:
        if isinstance(exc, InvalidSpec):
            raise
        raise InvalidSpec(f"{path}: {exc}") from exc


def write_spec(spec: ScenarioSpec, path) -> None:
    cp = configparser.ConfigParser()
    cp["scenario"] = {
        "n": str(spec.n),
        "f": str(spec.f),
        "semantic_fraction": repr(spec.semantic_fraction),
        "shake_bursts": format_bursts(spec.shake_bursts),
        "seed": str(spec.seed),
        "bins": str(spec.bins),
        "thumb_size": str(spec.thumb_size),
        "fps": repr(spec.fps),
    }
    with open(path, "w") as fh:
        cp.write(fh)


# --------------------------------------------------------------------------
# oracles
# --------------------------------------------------------------------------


def random_instance(seed: int, f: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """A random (f, n) dictionary with positive-mean columns and a motion vector."""
    rng = CounterRNG(seed).split("instance")
    D = rng.normal((f, n)) + rng.uniform((f, 1), 0.0, 1.0)
    motion = rng.uniform(n, 0.0, 2.0)
    return D, motion


def _llc_terms(D, w, lam):
    D = np.asarray(D, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if D.ndim != 2 or w.shape != (D.shape[1],):
        raise DimensionMismatch(f"dictionary {D.shape} and weights {w.shape} disagree")
    v = D.sum(axis=1)
    g = np.sqrt(((D - v[:, None]) ** 2).sum(axis=0))
    return D, v, lam * (w * g) ** 2


def oracle_llc_objective(D, w, lam, alpha) -> float:
    D, v, pen = _llc_terms(D, w, lam)
    r = v - D @ alpha
    return float(r @ r + np.sum(pen * alpha**2))


def oracle_llc_gradient(D, w, lam, alpha) -> np.ndarray:
    """Gradient of ``||v - D a||^2 + lam ||(w g) * a||^2`` at ``alpha``."""
    D, v, pen = _llc_terms(D, w, lam)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (D.shape[1],):
        raise DimensionMismatch(f"alpha has {alpha.shape[0]} entries, expected {D.shape[1]}")
    return 2.0 * D.T @ (D @ alpha - v) + 2.0 * pen * alpha


def oracle_llc_descent(D, w, lam, tol: float = 1e-10, max_iter: int = 2_000_000) -> np.ndarray:
    """Minimize the LLC objective by accelerated gradient descent.

    Uses only gradient evaluations: step ``1/L`` with ``L`` from the spectral
    norm of ``D`` and the largest penalty, and constant Nesterov momentum
    from the strong-convexity bound ``2 * min(penalty)``. Runs until the
    gradient norm is below ``tol``.
    """
    D, v, pen = _llc_terms(D, w, lam)
    L = 2.0 * (np.linalg.norm(D, 2) ** 2 + pen.max())
    mu = 2.0 * pen.min()
    q = math.sqrt(mu / L) if mu > 0 else 0.0
    beta = (1 - q) / (1 + q)
    x = np.zeros(D.shape[1])
    y = x.copy()
    for it in range(max_iter):
        grad = 2.0 * D.T @ (D @ y - v) + 2.0 * pen * y
        x_new = y - grad / L
        y = x_new + beta * (x_new - x)
        x = x_new
        if it % 16 == 0:
            g = 2.0 * D.T @ (D @ x - v) + 2.0 * pen * x
            if np.linalg.norm(g) < tol:
                break
    return x


def oracle_best_subset(D, m: int, limit: int = 500_000) -> tuple[tuple[int, ...], float]:
    """Exhaustive best ``m``-column least-squares reconstruction of the column sum."""
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[1]
    if not 1 <= m <= n:
        raise DimensionMismatch(f"subset size {m} outside [1, {n}]")
    if math.comb(n, m) > limit:
        raise TooLarge(f"C({n}, {m}) = {math.comb(n, m)} subsets exceed {limit}")
    v = D.sum(axis=1)
    best = (None, math.inf)
    for subset in itertools.combinations(range(n), m):
        cols = D[:, subset]
        coef, *_ = np.linalg.lstsq(cols, v, rcond=None)
        res = float(np.linalg.norm(v - cols @ coef))
        if res < best[1]:
            best = (subset, res)
    return best
