"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Verdicts are also collected and repeated in the pytest terminal summary.
"""

import json
import math
import os
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import VERDICTS, make_video
from ffwd.cli import main
from ffwd.metrics import discontinuity, instability_metric, semantic_retained, uniform_selection
from ffwd.model import Segment, read_container, round_half_up, write_container
from ffwd.pipeline import PipelineConfig, make_plan, run_ablation, run_pipeline
from ffwd.profile import RatePlan
from ffwd.rng import CounterRNG
from ffwd.sampler import motion_weights, solve_llc, solve_omp
from ffwd.smoother import emd_histograms
from ffwd.synth import (
    ScenarioSpec,
    asd_style_spec,
    generate,
    oracle_llc_descent,
    oracle_llc_gradient,
    random_instance,
    random_bursts,
)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def verdict(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


# --- 1 ---------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_1_llc_optimality():
    rng = CounterRNG(2024).split("c1")
    shapes = [(4 + rng.integers(0, 61), 5 + rng.integers(0, 196)) for _ in range(200)]
    solve_time = worst_grad = worst_gap = 0.0
    for k, (f, n) in enumerate(shapes):
        D, motion = random_instance(k, f, n)
        w = motion_weights(motion)
        t0 = time.perf_counter()
        sol = solve_llc(D, w)
        solve_time += time.perf_counter() - t0
        scale = np.max(np.abs(D.T @ D.sum(axis=1)))
        worst_grad = max(worst_grad, np.max(np.abs(oracle_llc_gradient(D, w, sol.lam, sol.alpha))) / scale)
        ref = oracle_llc_descent(D, w, sol.lam, tol=1e-10)
        worst_gap = max(worst_gap, np.max(np.abs(ref - sol.alpha)))
    ok = worst_grad < 1e-8 and worst_gap < 1e-6 and solve_time < 10.0
    verdict(
        1, ok, f"max |grad|/|D'v| {worst_grad:.2e}, max oracle gap {worst_gap:.2e}, solve time {solve_time:.3f} s"
    )


# --- 2 ---------------------------------------------------------------------------


def test_criterion_2_solver_speed_ordering():
    video = generate(asd_style_spec(0, 0.5, n=3000))
    rows = {r.method: r for r in run_ablation(video, PipelineConfig(), ("llc", "sc", "omp"), repeats=3)}
    llc, sc, omp = (rows[m].sampling_seconds for m in ("llc", "sc", "omp"))
    ok = llc <= sc / 5 and llc <= omp / 5
    verdict(2, ok, f"llc {llc:.4f} s, sc {sc:.4f} s ({sc / llc:.0f}x), omp {omp:.4f} s ({omp / llc:.0f}x)")


# --- 3 ---------------------------------------------------------------------------


def test_criterion_3_frame_budget():
    budget_ok, checked, devs = True, 0, []
    for fraction in (0.0, 0.25, 0.5, 0.75):
        for seed in range(5):
            res = run_pipeline(generate(asd_style_spec(seed, fraction)), PipelineConfig())
            devs.append(res.metrics.speedup_deviation)
            for seg, entries in zip(res.plan.segments, res.smoothed):
                target = min(seg.length, max(1, round_half_up(seg.length / seg.speedup)))
                room = entries[-1].index - entries[0].index + 1
                if room >= target:
                    checked += 1
                    budget_ok &= len(entries) == target
    mean_dev = float(np.mean(devs))
    ok = budget_ok and mean_dev < 1.0
    verdict(
        3,
        ok,
        f"per-segment budgets exact on {checked} segments: {budget_ok}; "
        f"mean speed-up deviation {mean_dev:.3f} (max {max(devs):.3f}) over {len(devs)} videos",
    )


# --- 4 and 5 ---------------------------------------------------------------------


def contrast_plan(plan):
    """Same segmentation, rates forced to 14 (non-semantic) and 2 (semantic)."""
    segs = tuple(
        Segment(s.start, s.end, s.importance_level, 2.0 if s.importance_level else 14.0) for s in plan.segments
    )
    return RatePlan(segs, plan.target, 1.0, 56.0)


@pytest.fixture(scope="module")
def contrast_suite():
    on, off = [], []
    cfg = PipelineConfig()
    for seed in range(1000, 1020):
        video = generate(asd_style_spec(seed, 0.5))
        plan = contrast_plan(make_plan(video, cfg))
        assert len(plan.segments) >= 2
        on.append(run_pipeline(video, cfg, plan).metrics)
        off.append(run_pipeline(video, replace(cfg, fill=False), plan).metrics)
    return on, off


def test_criterion_4_fill_reduces_discontinuity(contrast_suite):
    on, off = contrast_suite
    a = np.mean([m.discontinuity for m in on])
    b = np.mean([m.discontinuity for m in off])
    verdict(4, a <= 0.6 * b, f"discontinuity {b:.2f} -> {a:.2f} (ratio {a / b:.3f}, bound 0.6)")


def test_criterion_5_transition_smoothness(contrast_suite):
    on, off = contrast_suite
    a = np.mean([m.transition_smoothness for m in on])
    b = np.mean([m.transition_smoothness for m in off])
    verdict(5, a <= 0.6 * b, f"transition smoothness {b:.2f} -> {a:.2f} (ratio {a / b:.3f}, bound 0.6)")


# --- 6 ---------------------------------------------------------------------------


def test_criterion_6_semantic_retention_beats_uniform():
    worst, losses = math.inf, []
    for fraction in (0.25, 0.5, 0.75):
        for seed in range(30):
            video = generate(asd_style_spec(seed, fraction))
            res = run_pipeline(video, PipelineConfig())
            ours = res.metrics.semantic_retained
            base = semantic_retained(video, uniform_selection(video.n, res.metrics.n_selected))
            worst = min(worst, ours - base)
            if not ours > base:
                losses.append((fraction, seed))
    verdict(6, not losses, f"90 videos, smallest margin over uniform {worst:.4f}, losses {losses}")


# --- 7 ---------------------------------------------------------------------------


def test_criterion_7_metric_units():
    d = discontinuity([0, 10, 30], 10.0)
    emd = emd_histograms(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    video = make_video(n=6, thumbs=np.full((6, 8, 8), 120))
    inst = instability_metric(video, [0, 2, 3, 5])
    ok = abs(d - 5.7735) <= 1e-4 and emd == 1.0 and inst == 0.0
    verdict(7, ok, f"discontinuity {d:.6f}, EMD {emd!r}, identical-thumbnail instability {inst!r}")


# --- 8 ---------------------------------------------------------------------------


def test_criterion_8_determinism(tmp_path):
    spec = ScenarioSpec(n=1500, f=32, semantic_fraction=0.5, shake_bursts=random_bursts(8, 1500), seed=8)
    src = tmp_path / "v.ffwd"
    write_container(generate(spec), src)
    outs = []
    for name in ("a", "b"):
        assert main(["run", str(src), "-o", str(tmp_path / name)]) == 0
        outs.append([(tmp_path / name / f).read_bytes() for f in ("plan.json", "selection.json", "metrics.json")])
    again = tmp_path / "again.ffwd"
    write_container(read_container(src), again)
    runs_equal = outs[0] == outs[1]
    round_trip = src.read_bytes() == again.read_bytes()
    verdict(8, runs_equal and round_trip, f"run outputs identical: {runs_equal}; container round-trip: {round_trip}")


# --- 9 ---------------------------------------------------------------------------


def test_criterion_9_omp_against_best_subset():
    with open(os.path.join(GOLDEN, "best_subset_n12_m3.json")) as fh:
        golden = json.load(fh)
    ratios = {}
    for f, rows in golden["instances"].items():
        r = []
        for row in rows:
            D, _ = random_instance(row["seed"], int(f), 12)
            r.append(solve_omp(D, 3).reconstruction_error / row["residual"])
        ratios[int(f)] = np.array(r)
    main_suite = ratios[32]
    side = ratios[6]
    ok = bool(np.all(main_suite <= 2.0 + 1e-12))
    verdict(
        9,
        ok,
        f"f=32: {main_suite.size} instances, max ratio {main_suite.max():.3f}; "
        f"(info) f=6: max ratio {side.max():.3f}, {int(np.sum(side > 2))} above 2",
    )
