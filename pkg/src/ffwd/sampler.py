"""Weighted sparse frame sampling within one segment.

A segment's frames form the dictionary ``D`` (one column per frame) and the
segment "story" ``v`` is the sum of the columns. Each solver returns an
activation vector ``alpha``; the frames with the largest ``|alpha|`` are kept.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np
from scipy import linalg

from .errors import DimensionMismatch
from .model import Entry, Segment, VideoRecord, round_half_up

EPS = 1e-9
DEFAULT_LAMBDA_SCALE = 0.01
METHODS = ("llc", "sc", "omp")


@dataclass(frozen=True)
class ActivationSolution:
    alpha: np.ndarray
    g: np.ndarray
    w: np.ndarray
    lam: float
    story: np.ndarray
    reconstruction_error: float
    method: str = "llc"


@dataclass(frozen=True)
class SamplerChoice:
    method: str = "llc"
    m: Optional[int] = None  # frame budget; filled in per segment

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown sampler {self.method!r}; expected one of {METHODS}")


def motion_weights(motion) -> np.ndarray:
    """Map camera motion to penalty weights, mean-normalized to 1.

    Higher motion gives a smaller weight, i.e. a cheaper coefficient.
    """
    motion = np.asarray(motion, dtype=np.float64)
    if motion.size == 0:
        return motion.copy()
    if not np.any(motion > 0):
        return np.ones_like(motion)
    w = np.exp(-motion / (motion.mean() + EPS))
    return w / w.mean()


def story_and_distances(D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    v = D.sum(axis=1)
    g = np.linalg.norm(D - v[:, None], axis=0)
    return v, g


def default_lambda(D: np.ndarray, scale: float = DEFAULT_LAMBDA_SCALE) -> float:
    n = D.shape[1]
    return scale * float(np.einsum("ij,ij->", D, D)) / n


def _check(D, w):
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[1] < 1:
        raise DimensionMismatch(f"dictionary must be (f, n) with n >= 1, got shape {D.shape}")
    if w is None:
        w = np.ones(D.shape[1])
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (D.shape[1],):
        raise DimensionMismatch(f"{w.shape[0]} weights for {D.shape[1]} dictionary columns")
    return D, w


def _spd_solve(A: np.ndarray, b: np.ndarray, jitter: float) -> np.ndarray:
    try:
        return linalg.cho_solve(linalg.cho_factor(A, check_finite=False), b, check_finite=False)
    except linalg.LinAlgError:
        A = A + jitter * np.eye(A.shape[0])
        return linalg.cho_solve(linalg.cho_factor(A, check_finite=False), b, check_finite=False)


def solve_llc(D, w=None, lam: Optional[float] = None) -> ActivationSolution:
    """Closed-form weighted LLC coding of the segment story.

    Minimizes ``||v - D a||^2 + lam * ||diag(w) g * a||^2``, whose normal
    equations are ``(D'D + lam diag((w g)^2)) a = D'v``. When the segment has
    more frames than feature dimensions and every penalty is positive the
    equivalent ``f x f`` system ``(I + D P^-1 D') u = v``, ``a = P^-1 D' u`` is
    factored instead.
    """
    D, w = _check(D, w)
    f, n = D.shape
    v, g = story_and_distances(D)
    if lam is None:
        lam = default_lambda(D)
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    gram_trace = float(np.einsum("ij,ij->", D, D))
    if gram_trace == 0.0:
        alpha = np.zeros(n)
    else:
        jitter = 1e-10 * gram_trace / n
        pen = lam * (w * g) ** 2
        if n > f and np.all(pen > 0):
            Dp = D / pen
            u = _spd_solve(np.eye(f) + Dp @ D.T, v, jitter)
            alpha = Dp.T @ u
        else:
            A = D.T @ D
            A[np.diag_indices(n)] += pen
            alpha = _spd_solve(A, D.T @ v, jitter)
    err = float(np.linalg.norm(v - D @ alpha))
    return ActivationSolution(alpha, g, w, float(lam), v, err, "llc")


@numba.njit(cache=True)
def _cd_pass(G, diag, thresh, a, c):
    """One cyclic pass over every coordinate; returns the largest move."""
    biggest = 0.0
    n = G.shape[0]
    for j in range(n):
        d = diag[j]
        if d <= 0.0:
            continue
        old = a[j]
        z = c[j] + d * old
        t = thresh[j]
        if z > t:
            new = (z - t) / d
        elif z < -t:
            new = (z + t) / d
        else:
            new = 0.0
        delta = new - old
        if delta != 0.0:
            a[j] = new
            for i in range(n):
                c[i] -= G[i, j] * delta
            if abs(delta) > biggest:
                biggest = abs(delta)
    return biggest


@numba.njit(cache=True)
def _cd_loop(G, b, thresh, a, tol, max_sweeps):
    diag = np.diag(G).copy()
    sweeps = 0
    while sweeps < max_sweeps:
        c = b - G @ a
        sweeps += 1
        if _cd_pass(G, diag, thresh, a, c) < tol:
            break
        # iterate the active block on its own until it settles
        act = np.flatnonzero(a)
        if act.size == 0:
            continue
        Ga = np.ascontiguousarray(G[act][:, act])
        aa = a[act].copy()
        ca = c[act].copy()
        while sweeps < max_sweeps:
            sweeps += 1
            if _cd_pass(Ga, diag[act], thresh[act], aa, ca) < tol:
                break
        a[act] = aa
    return sweeps


def weighted_lasso(
    D,
    v,
    w,
    lam: float,
    tol: float = 1e-8,
    max_sweeps: int = 10000,
    alpha0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Cyclic coordinate descent for ``1/2 ||v - D a||^2 + lam * sum(w_i |a_i|)``.

    Works on the Gram matrix; after each full sweep the active set is iterated
    to convergence before the next full sweep checks it. Stops when no
    coordinate moves by more than ``tol`` in a full sweep.
    """
    D = np.asarray(D, dtype=np.float64)
    G = np.ascontiguousarray(D.T @ D)
    b = D.T @ np.asarray(v, dtype=np.float64)
    a = np.zeros(G.shape[0]) if alpha0 is None else np.array(alpha0, dtype=np.float64)
    thresh = lam * np.asarray(w, dtype=np.float64)
    _cd_loop(G, b, thresh, a, tol, max_sweeps)
    return a


def solve_sc(
    D,
    w=None,
    m: int = 1,
    max_steps: int = 60,
    tol: float = 1e-8,
) -> ActivationSolution:
    """Weighted Lasso sampler with lambda tuned to give about ``m`` nonzeros.

    Bisects ``log(lambda)`` over ``[1e-6, 1e6] * ||D'v||_inf`` until the
    support size lands in ``[m, 1.1 m]``; otherwise keeps the solution whose
    support size was closest to ``m``.
    """
    D, w = _check(D, w)
    n = D.shape[1]
    if not 1 <= m <= n:
        raise DimensionMismatch(f"target {m} frames outside [1, {n}]")
    v, g = story_and_distances(D)
    lam_hat = float(np.max(np.abs(D.T @ v)))
    if lam_hat == 0.0:
        return ActivationSolution(np.zeros(n), g, w, 1.0, v, float(np.linalg.norm(v)), "sc")

    lo, hi = math.log(1e-6 * lam_hat), math.log(1e6 * lam_hat)
    upper = max(m, int(math.floor(1.1 * m)))
    # a lasso solution generically has at most rank(D) nonzeros
    rank = int(np.linalg.matrix_rank(D))
    best = None
    tried: list[tuple[float, np.ndarray]] = []
    for _ in range(max_steps):
        log_lam = 0.5 * (lo + hi)
        lam = math.exp(log_lam)
        start = min(tried, key=lambda t: abs(t[0] - log_lam))[1] if tried else None
        alpha = weighted_lasso(D, v, w, lam, tol=tol, alpha0=start)
        tried.append((log_lam, alpha))
        count = int(np.count_nonzero(alpha))
        key = (abs(count - m), -count)
        if best is None or key < best[0]:
            best = (key, lam, alpha)
        if m <= count <= upper:
            break
        if count < m and count >= rank:
            break
        if count > upper:
            lo = log_lam
        else:
            hi = log_lam
    _, lam, alpha = best
    err = float(np.linalg.norm(v - D @ alpha))
    return ActivationSolution(alpha, g, w, lam, v, err, "sc")


def solve_omp(D, m: int, w=None, tol: float = 1e-10) -> ActivationSolution:
    """Orthogonal matching pursuit on the segment story.

    Atoms are ranked by normalized correlation ``|d_i' r| / ||d_i||``; the
    coefficients are refit by least squares on the active set after every
    pick. Stops at ``m`` atoms, when the residual norm drops below ``tol``, or
    when no remaining atom correlates with the residual.
    """
    D, w = _check(D, w)
    f, n = D.shape
    if not 1 <= m <= n:
        raise DimensionMismatch(f"target {m} frames outside [1, {n}]")
    v, g = story_and_distances(D)
    norms = np.linalg.norm(D, axis=0)
    usable = norms > 0
    inv_norms = np.where(usable, 1.0 / np.where(usable, norms, 1.0), 0.0)

    support: list[int] = []
    coef = np.zeros(0)
    residual = v.copy()
    scale = max(1.0, float(np.linalg.norm(v)))
    while len(support) < m and np.linalg.norm(residual) >= tol:
        corr = np.abs(D.T @ residual) * inv_norms
        corr[support] = -1.0
        j = int(np.argmax(corr))
        if corr[j] <= 1e-12 * scale:
            break
        support.append(j)
        coef, *_ = np.linalg.lstsq(D[:, support], v, rcond=None)
        residual = v - D[:, support] @ coef
    alpha = np.zeros(n)
    alpha[support] = coef
    # lambda does not enter the greedy solve; recorded with the LLC default
    return ActivationSolution(
        alpha, g, w, default_lambda(D), v, float(np.linalg.norm(residual)), "omp"
    )


def select_frames(sol_or_alpha, m: int) -> np.ndarray:
    """Indices of the ``m`` largest ``|alpha|`` (ties to the lower index), ascending."""
    alpha = getattr(sol_or_alpha, "alpha", sol_or_alpha)
    alpha = np.asarray(alpha, dtype=np.float64)
    m = min(int(m), alpha.size)
    order = np.lexsort((np.arange(alpha.size), -np.abs(alpha)))
    return np.sort(order[:m])


def sampling_budget(n_seg: int, speedup: float, spf: int = 2) -> int:
    return min(n_seg, max(1, round_half_up(n_seg / (speedup * spf))))


@dataclass
class SampleResult:
    entries: list[Entry]
    solution: ActivationSolution
    solve_seconds: float


def sample_range(
    video: VideoRecord,
    start: int,
    end: int,
    speedup: float,
    method: str = "llc",
    spf: int = 2,
    lambda_scale: float = DEFAULT_LAMBDA_SCALE,
    segment_id: int = 0,
    provenance: str = "sampled",
) -> SampleResult:
    """Sample frames ``start..end`` (inclusive) at ``speedup * spf``."""
    if spf < 1:
        raise ValueError("SpF must be >= 1")
    n_seg = end - start + 1
    D = video.features[start : end + 1].T
    w = motion_weights(video.motion[start : end + 1])
    m = sampling_budget(n_seg, speedup, spf)
    t0 = time.perf_counter()
    if method == "llc":
        sol = solve_llc(D, w, default_lambda(D, lambda_scale))
    elif method == "sc":
        sol = solve_sc(D, w, m)
    elif method == "omp":
        sol = solve_omp(D, m, w)
    else:
        raise ValueError(f"unknown sampler {method!r}")
    elapsed = time.perf_counter() - t0
    local = select_frames(sol, m)
    entries = [Entry(start + int(i), segment_id, provenance) for i in local]
    return SampleResult(entries, sol, elapsed)


def sample_segment(
    video: VideoRecord,
    segment: Segment,
    choice: SamplerChoice | str = "llc",
    spf: int = 2,
    lambda_scale: float = DEFAULT_LAMBDA_SCALE,
    segment_id: int = 0,
) -> list[Entry]:
    method = choice.method if isinstance(choice, SamplerChoice) else choice
    return sample_range(
        video, segment.start, segment.end, segment.speedup, method, spf, lambda_scale, segment_id
    ).entries
