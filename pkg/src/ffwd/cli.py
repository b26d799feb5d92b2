"""Command-line interface: one subcommand per pipeline stage plus ``run`` and ``ablate``.

Exit codes: 0 success, 2 I/O failure, 3 invalid container/input/invariant,
4 infeasible rate plan.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import report
from .errors import BinCountMismatch, FFWDError, InfeasibleRates, IoFailure
from .model import read_container, write_container
from .pipeline import (
    PipelineConfig,
    fill_stage,
    flatten,
    format_ablation,
    group_by_segment,
    make_plan,
    metrics_stage,
    run_ablation,
    run_pipeline,
    sample_stage,
    smooth_stage,
)
from .sampler import DEFAULT_LAMBDA_SCALE, METHODS
from .synth import ScenarioSpec, generate, parse_bursts, random_bursts, read_spec

EXIT_IO = 2
EXIT_INVALID = 3
EXIT_INFEASIBLE = 4

log = logging.getLogger("ffwd")


# --- argument groups ---------------------------------------------------------


def _plan_args(p):
    p.add_argument("--speedup", type=float, default=10.0, help="required speed-up S_d (default 10)")
    p.add_argument("--levels", type=int, default=2, help="importance levels for semantic segments")
    p.add_argument("--min-seg-len", type=int, default=None, help="shortest segment in frames (default 2*S_d)")
    p.add_argument("--smooth-radius", type=int, default=None, help="profile smoothing radius (default fps/2)")
    p.add_argument("--s-min", type=float, default=1.0, help="lowest allowed segment rate")
    p.add_argument("--s-max", type=float, default=None, help="highest allowed segment rate (default 4*S_d)")


def _sampler_args(p):
    p.add_argument("--sampler", choices=METHODS, default="llc")
    p.add_argument("--lambda-scale", type=float, default=DEFAULT_LAMBDA_SCALE)
    p.add_argument("--spf", type=int, default=2, help="first-phase speed-up factor")
    p.add_argument("--threads", type=int, default=None, help="worker cap (FFWD_THREADS overrides)")


def _hist_args(p):
    p.add_argument("--hist-bins", type=int, default=None, help="expected histogram bins; must match the container")


def _fill_args(p):
    p.add_argument("--no-fill", action="store_true", help="disable gap filling")


def _metric_args(p):
    p.add_argument("--metrics-window", type=int, default=4, help="instability window in frames")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffwd", description="Semantic fast-forward frame selection.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging (includes smoothing trace)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a seeded synthetic container")
    p.add_argument("output")
    p.add_argument("--config", help="scenario key/value file ([scenario] section)")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--semantic-fraction", type=float, default=None)
    p.add_argument(
        "--bursts", default=None, help='shake bursts "start:length:amplitude, ..." (default: seeded random)'
    )
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--thumb-size", type=int, default=None, help="0 disables thumbnails")

    p = sub.add_parser("segment", help="profile, segment and rate a container")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="rate plan report")
    _plan_args(p)

    p = sub.add_parser("sample", help="first-phase sparse sampling per segment")
    p.add_argument("input")
    p.add_argument("--plan", required=True)
    p.add_argument("-o", "--output", required=True, help="selection report")
    _sampler_args(p)

    p = sub.add_parser("smooth", help="insert frames into the shakiest transitions")
    p.add_argument("input")
    p.add_argument("--plan", required=True)
    p.add_argument("--selection", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--threads", type=int, default=None)
    _hist_args(p)

    p = sub.add_parser("fillgap", help="bridge gaps between consecutive segments")
    p.add_argument("input")
    p.add_argument("--plan", required=True)
    p.add_argument("--selection", required=True)
    p.add_argument("-o", "--output", required=True)
    _sampler_args(p)
    _hist_args(p)
    _fill_args(p)

    p = sub.add_parser("metrics", help="evaluate a selection")
    p.add_argument("input")
    p.add_argument("--plan", required=True)
    p.add_argument("--selection", required=True)
    p.add_argument("-o", "--output", default=None, help="metrics report (default: stdout)")
    _metric_args(p)

    p = sub.add_parser("run", help="the whole pipeline")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True, help="output directory")
    _plan_args(p)
    _sampler_args(p)
    _hist_args(p)
    _fill_args(p)
    _metric_args(p)

    p = sub.add_parser("ablate", help="compare samplers on one input")
    p.add_argument("input")
    p.add_argument("--methods", default=",".join(METHODS), help="comma-separated sampler list")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("-o", "--output", default=None, help="also write a JSON report here")
    _plan_args(p)
    _sampler_args(p)
    _fill_args(p)
    _metric_args(p)
    return parser


# --- helpers -------------------------------------------------------------------


def _config(args) -> PipelineConfig:
    get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
    return PipelineConfig(
        input=args.input,
        output=get("output"),
        speedup=get("speedup", 10.0),
        sampler=get("sampler", "llc"),
        spf=get("spf", 2),
        fill=not get("no_fill", False),
        levels=get("levels", 2),
        min_seg_len=get("min_seg_len"),
        smooth_radius=get("smooth_radius"),
        metric_window=get("metrics_window", 4),
        lambda_scale=get("lambda_scale", DEFAULT_LAMBDA_SCALE),
        s_min=get("s_min", 1.0),
        s_max=get("s_max"),
        threads=get("threads"),
    )


def _load(args):
    video = read_container(args.input)
    bins = getattr(args, "hist_bins", None)
    if bins is not None and bins != video.bins:
        raise BinCountMismatch(f"--hist-bins {bins} but the container has {video.bins} bins")
    return video


def _load_plan(path):
    return report.plan_from_dict(report.read_report(path, report.PLAN_SCHEMA))


def _load_selection(path):
    return report.selection_from_dict(report.read_report(path, report.SELECTION_SCHEMA))


def _write_selection(sel, path, stage, n):
    report.write_report(report.selection_to_dict(sel, stage, n), path)


# --- subcommands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    spec = read_spec(args.config) if args.config else ScenarioSpec()
    overrides = {
        "seed": args.seed,
        "n": args.frames,
        "f": args.dim,
        "semantic_fraction": args.semantic_fraction,
        "bins": args.bins,
        "thumb_size": args.thumb_size,
    }
    if args.bursts is not None:
        overrides["shake_bursts"] = parse_bursts(args.bursts)
    spec = replace(spec, **{k: v for k, v in overrides.items() if v is not None})
    if args.bursts is None and not args.config:
        # no explicit bursts: seeded random ones, as in the benchmark scenarios
        spec = replace(spec, shake_bursts=random_bursts(spec.seed, spec.n))
    write_container(generate(spec), args.output)
    return 0


def cmd_segment(args) -> int:
    video = _load(args)
    try:
        plan = make_plan(video, _config(args))
    except InfeasibleRates as exc:
        if exc.plan is not None:
            report.write_report(report.plan_to_dict(exc.plan), args.output)
        raise
    report.write_report(report.plan_to_dict(plan), args.output)
    return 0


def cmd_sample(args) -> int:
    video = _load(args)
    plan = _load_plan(args.plan)
    stage = sample_stage(video, plan, _config(args))
    for k, secs in enumerate(stage.solve_seconds):
        log.debug("segment %d solver %.6f s", k, secs)
    _write_selection(flatten(stage.per_segment, plan.target), args.output, "sampled", video.n)
    return 0


def cmd_smooth(args) -> int:
    video = _load(args)
    plan = _load_plan(args.plan)
    sel = _load_selection(args.selection)
    sel.check_against(video)
    smoothed = smooth_stage(video, plan, group_by_segment(sel, len(plan.segments)), _config(args))
    _write_selection(flatten(smoothed, plan.target), args.output, "smoothed", video.n)
    return 0


def cmd_fillgap(args) -> int:
    video = _load(args)
    plan = _load_plan(args.plan)
    sel = _load_selection(args.selection)
    sel.check_against(video)
    final = fill_stage(video, plan, group_by_segment(sel, len(plan.segments)), _config(args))
    _write_selection(final, args.output, "final", video.n)
    return 0


def cmd_metrics(args) -> int:
    video = _load(args)
    plan = _load_plan(args.plan)
    sel = _load_selection(args.selection)
    sel.check_against(video)
    cfg = replace(_config(args), speedup=sel.required_speedup)
    obj = report.metrics_to_dict(metrics_stage(video, plan, sel, cfg))
    if args.output:
        report.write_report(obj, args.output)
    else:
        sys.stdout.write(report.dumps(obj))
    return 0


def cmd_run(args) -> int:
    video = _load(args)
    cfg = _config(args)
    res = run_pipeline(video, cfg)
    report.ensure_dir(args.output)
    report.write_report(report.plan_to_dict(res.plan), os.path.join(args.output, "plan.json"))
    _write_selection(res.selection, os.path.join(args.output, "selection.json"), "final", video.n)
    report.write_report(report.metrics_to_dict(res.metrics), os.path.join(args.output, "metrics.json"))
    for stage, secs in res.seconds.items():
        log.debug("%s: %.4f s", stage, secs)
    return 0


def cmd_ablate(args) -> int:
    video = _load(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown sampler(s) {unknown}")
    cfg = _config(args)
    rows = run_ablation(video, cfg, methods, args.repeats)
    sys.stdout.write(format_ablation(rows))
    if args.output:
        report.write_report(report.ablation_to_dict(rows, cfg.speedup), args.output)
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "segment": cmd_segment,
    "sample": cmd_sample,
    "smooth": cmd_smooth,
    "fillgap": cmd_fillgap,
    "metrics": cmd_metrics,
    "run": cmd_run,
    "ablate": cmd_ablate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except IoFailure as exc:
        print(f"ffwd: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InfeasibleRates as exc:
        print(f"ffwd: infeasible rates: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (FFWDError, ValueError) as exc:
        print(f"ffwd: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
