"""Sampler comparison over a batch of seeded scenarios.

    python3 scripts/ablation_table.py --seeds 5 --frames 3000

Prints one table per scenario and a mean row per method.
"""

import argparse
from collections import defaultdict

import numpy as np

from ffwd.pipeline import PipelineConfig, format_ablation, run_ablation
from ffwd.synth import asd_style_spec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--frames", type=int, default=3000)
    ap.add_argument("--fraction", type=float, default=0.5)
    ap.add_argument("--methods", default="llc,sc,omp")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    methods = args.methods.split(",")
    totals = defaultdict(list)
    for seed in range(args.seeds):
        video = generate(asd_style_spec(seed, args.fraction, n=args.frames))
        rows = run_ablation(video, PipelineConfig(), methods, args.repeats)
        print(f"seed {seed}")
        print(format_ablation(rows))
        for r in rows:
            totals[r.method].append(
                (r.sampling_seconds, r.metrics.semantic_retained, r.metrics.speedup_deviation)
            )
    print("mean over seeds")
    print(f"{'method':>6}  {'time_s':>8}  {'semantic':>8}  {'speedup_dev':>11}")
    for method in methods:
        t, sem, dev = np.mean(totals[method], axis=0)
        print(f"{method:>6}  {t:8.4f}  {sem:8.4f}  {dev:11.3f}")


if __name__ == "__main__":
    main()
