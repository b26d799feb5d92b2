"""Gap filling on and off over a suite of high-contrast rate plans.

    python3 scripts/fill_study.py --seeds 20

Each scenario keeps its automatic segmentation but runs non-semantic
segments at --fast and semantic ones at --slow.
"""

import argparse
from dataclasses import replace

import numpy as np

from ffwd.model import Segment
from ffwd.pipeline import PipelineConfig, make_plan, run_pipeline
from ffwd.profile import RatePlan
from ffwd.synth import asd_style_spec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--first-seed", type=int, default=1000)
    ap.add_argument("--fast", type=float, default=14.0)
    ap.add_argument("--slow", type=float, default=2.0)
    args = ap.parse_args()

    cfg = PipelineConfig()
    rows = []
    print(f"{'seed':>5}  {'disc_off':>8}  {'disc_on':>8}  {'ts_off':>8}  {'ts_on':>8}  {'bridges':>7}")
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        video = generate(asd_style_spec(seed, 0.5))
        auto = make_plan(video, cfg)
        segs = tuple(
            Segment(s.start, s.end, s.importance_level, args.slow if s.importance_level else args.fast)
            for s in auto.segments
        )
        plan = RatePlan(segs, cfg.speedup, 1.0, 4 * args.fast)
        on = run_pipeline(video, cfg, plan)
        off = run_pipeline(video, replace(cfg, fill=False), plan).metrics
        m = on.metrics
        rows.append((off.discontinuity, m.discontinuity, off.transition_smoothness, m.transition_smoothness))
        print(
            f"{seed:5d}  {off.discontinuity:8.2f}  {m.discontinuity:8.2f}  "
            f"{off.transition_smoothness:8.2f}  {m.transition_smoothness:8.2f}  {len(on.selection.bridges):7d}"
        )
    d0, d1, t0, t1 = np.mean(rows, axis=0)
    print(f"mean discontinuity {d0:.2f} -> {d1:.2f} ({d1 / d0:.3f}x)")
    print(f"mean transition smoothness {t0:.2f} -> {t1:.2f} ({t1 / t0:.3f}x)")


if __name__ == "__main__":
    main()
