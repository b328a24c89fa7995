"""Command-line front end: generate data, run stratification, verify
against hull oracles.  All outputs land in a run directory together with
a copy of the effective configuration so runs reproduce from disk alone.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, datagen, pointcloud, stratify, svgplot
from .errors import ChsaError
from .ipm import SolverConfig
from .qp import ChsaParams

EXIT_BAD_SPEC = 2
EXIT_IO = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=None,
                        help="neighbor count (default: p-1)")
    parser.add_argument("--lambda", dest="lam", type=float, default=1e-3,
                        help="convexity weight")
    parser.add_argument("--gamma", type=float, default=1e-6,
                        help="uniformity weight")
    parser.add_argument("--tol-gap", type=float, default=1e-9)
    parser.add_argument("--tol-feas", type=float, default=1e-8)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1,
                        help="worker process count")
    parser.add_argument("--scale", choices=["unit", "none"], default="unit",
                        help="rescale input into [0,1] per dimension")
    parser.add_argument("--global-scale", action="store_true",
                        help="use one min/max over all dimensions instead of "
                             "per-dimension ranges")
    parser.add_argument("--log-transform", action="store_true",
                        help="apply coordinate-wise log before scaling")
    parser.add_argument("--input", help="CSV cloud to read")
    parser.add_argument("--generate", dest="genspec",
                        help="generator spec JSON to run instead of --input")
    parser.add_argument("-o", "--output-dir", default=".",
                        help="directory for reports and figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chsa",
        description="Stratify a point cloud by proximity to its convex hull "
                    "boundary via per-point quadratic programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic cloud to CSV")
    p_gen.add_argument("spec", help="generator spec JSON")
    p_gen.add_argument("-o", "--output", default="cloud.csv")

    p_strat = sub.add_parser("stratify", help="run the stratification")
    _add_common(p_strat)
    p_strat.add_argument("--color-by", choices=["negativity", "norm-rank"],
                         default="negativity")
    p_strat.add_argument("--sweep-lambda",
                         help="comma list of lambda values; one report each")
    p_strat.add_argument("--no-plot", action="store_true",
                         help="skip SVG output")

    p_ver = sub.add_parser("verify",
                           help="compare flagged points against a hull oracle")
    _add_common(p_ver)
    p_ver.add_argument("--oracle", choices=["2d", "lp"], default="2d")
    return parser


def _load_cloud(args) -> pointcloud.PointCloud:
    if (args.input is None) == (args.genspec is None):
        print("exactly one of --input / --generate is required",
              file=sys.stderr)
        sys.exit(EXIT_BAD_SPEC)
    if args.genspec is not None:
        try:
            spec = datagen.GenSpec.from_json(args.genspec)
            return datagen.gen(spec)
        except (OSError, ValueError, TypeError, ChsaError) as exc:
            print(f"bad generator spec: {exc}", file=sys.stderr)
            sys.exit(EXIT_BAD_SPEC)
    try:
        return pointcloud.read_csv(args.input)
    except (OSError, ValueError) as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        sys.exit(EXIT_IO)


def _preprocess(cloud, args):
    if args.log_transform:
        cloud = pointcloud.log_transform(cloud)
    if args.scale == "unit":
        if args.global_scale:
            lo = cloud.points.min()
            rng = cloud.points.max() - lo
            pts = (cloud.points - lo) / (rng if rng > 0 else 1.0)
            cloud = cloud.with_points(pts)
        else:
            cloud, _ = pointcloud.scale_unit(cloud)
    return cloud


def _effective_k(cloud, args) -> int:
    return cloud.size - 1 if args.k is None else args.k


def _dump_config(args, outdir: str) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "command"}
    cfg["command"] = args.command
    with open(os.path.join(outdir, "run_config.json"), "w") as f:
        json.dump(cfg, f, indent=1, sort_keys=True)


def cmd_generate(args) -> int:
    try:
        spec = datagen.GenSpec.from_json(args.spec)
        cloud = datagen.gen(spec)
    except (OSError, ValueError, TypeError, ChsaError) as exc:
        print(f"bad generator spec: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    pointcloud.write_csv(cloud, args.output)
    print(f"wrote {cloud.size} points to {args.output}")
    return 0


def _run_one(cloud, k, params, solver, args, outdir, tag=""):
    report = stratify.run_chsa(
        cloud, k, params, solver, workers=args.threads,
        allow_unscaled=(args.scale == "none"), seed=args.seed)
    stratify.write_report_json(report, os.path.join(outdir, f"report{tag}.json"))
    stratify.write_report_csv(report, os.path.join(outdir, f"report{tag}.csv"))
    if not args.no_plot:
        coords = (cloud.points if cloud.dim == 2
                  else analysis.pca_2d(cloud))
        svgplot.write_scatter(os.path.join(outdir, f"figure{tag}.svg"),
                              coords, report, color_by=args.color_by)
    return report


def cmd_stratify(args) -> int:
    cloud = _preprocess(_load_cloud(args), args)
    k = _effective_k(cloud, args)
    os.makedirs(args.output_dir, exist_ok=True)
    _dump_config(args, args.output_dir)
    solver = SolverConfig(tol_gap=args.tol_gap, tol_feas=args.tol_feas)

    if args.sweep_lambda:
        lams = [float(v) for v in args.sweep_lambda.split(",")]
        counts = []
        for lam in lams:
            tag = f"_lambda{lam:g}"
            report = _run_one(cloud, k, ChsaParams(gamma=args.gamma, lam=lam),
                              solver, args, args.output_dir, tag)
            counts.append((lam, len(report.flagged_indices)))
        with open(os.path.join(args.output_dir, "sweep_counts.csv"), "w") as f:
            f.write("lambda,flagged_count\n")
            for lam, count in counts:
                f.write(f"{lam:g},{count}\n")
        for lam, count in counts:
            print(f"lambda={lam:g}: {count} flagged")
    else:
        report = _run_one(cloud, k, ChsaParams(gamma=args.gamma, lam=args.lam),
                          solver, args, args.output_dir)
        print(f"{len(report.flagged_indices)} of {cloud.size} points flagged")
    return 0


def cmd_verify(args) -> int:
    cloud = _preprocess(_load_cloud(args), args)
    k = _effective_k(cloud, args)
    os.makedirs(args.output_dir, exist_ok=True)
    _dump_config(args, args.output_dir)
    solver = SolverConfig(tol_gap=args.tol_gap, tol_feas=args.tol_feas)
    report = stratify.run_chsa(
        cloud, k, ChsaParams(gamma=args.gamma, lam=args.lam), solver,
        workers=args.threads, allow_unscaled=(args.scale == "none"),
        seed=args.seed)
    flagged = set(report.flagged_indices)

    if args.oracle == "2d":
        if cloud.dim != 2:
            print("2d oracle needs planar data; use --oracle lp",
                  file=sys.stderr)
            return EXIT_BAD_SPEC
        truth = set(analysis.hull_2d(cloud).vertex_indices)
    else:
        truth = {i for i in range(cloud.size)
                 if analysis.lp_vertex_oracle(cloud, i)}

    tp = len(flagged & truth)
    precision = tp / len(flagged) if flagged else float("nan")
    recall = tp / len(truth) if truth else float("nan")
    summary = {
        "flagged": sorted(flagged),
        "oracle_vertices": sorted(truth),
        "precision": precision,
        "recall": recall,
    }
    with open(os.path.join(args.output_dir, "verify_summary.json"), "w") as f:
        json.dump(summary, f, indent=1)
    print(f"precision={precision:.4f} recall={recall:.4f} "
          f"({len(flagged)} flagged, {len(truth)} oracle vertices)")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"generate": cmd_generate, "stratify": cmd_stratify,
               "verify": cmd_verify}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
