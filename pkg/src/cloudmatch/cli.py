"""Command-line interface: ``cloudmatch {register,gen,bench}``.

Exit codes: 0 success, 1 bad input or parameters, 2 ``--strict-delta`` rejection.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import io, svg
from .core import CloudError
from .experiments import (
    DEFAULT_K_VALUES,
    ClassificationParams,
    SubsetParams,
    run_classification_experiment,
    run_subset_experiment,
)
from .registration import StrictDeltaError, default_workers, register
from .synth import (
    ELLIPSE_DELETIONS,
    SyntheticPair,
    ellipse_pair,
    gen_disk_cloud,
    gen_ellipse_partial,
    gen_sine,
    shared_subset_pair,
    sine_pair,
)

EXIT_OK, EXIT_INPUT, EXIT_STRICT = 0, 1, 2


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _ranges(text: str) -> list[tuple[int, int]]:
    """``51-69,111-169`` -> ``[(51, 69), (111, 169)]``; empty string means none."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        lo, _, hi = part.partition("-")
        out.append((int(lo), int(hi or lo)))
    return out


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


# ---------------------------------------------------------------------------
# register


def cmd_register(args: argparse.Namespace) -> int:
    X = io.read_cloud(args.cloud_x)
    Y = io.read_cloud(args.cloud_y)
    t0 = time.perf_counter()
    try:
        res = register(X, Y, args.delta, strict_delta=args.strict_delta,
                       all_solutions=args.all_solutions, workers=args.threads)
    except StrictDeltaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRICT
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    out = io.result_to_dict(res, runtime_ms)
    if args.out:
        io.write_json(out, args.out)
    else:
        json.dump(out, sys.stdout, indent=1)
        sys.stdout.write("\n")
    if args.svg:
        Path(args.svg).write_text(svg.overlay_svg(X, Y, res))
    print(f"k_total={res.k_total} theta={res.theta:.9f} energy={res.energy} "
          f"pivots=({res.best.p},{res.best.q}) delta_ok={res.delta_ok}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _pair_manifest(pair: SyntheticPair, args: argparse.Namespace) -> dict:
    return {
        "kind": pair.meta.get("kind"),
        "seed": args.seed,
        "rotation": pair.rotation,
        "truth_theta": pair.truth_theta,
        "noise_sigma": pair.sigma,
        "params": pair.meta,
        "deletions": pair.meta.get("deleted_ranges", []),
        "m": len(pair.X),
        "n": len(pair.Y),
        "correspondences": [list(c) for c in pair.correspondences],
    }


def cmd_gen(args: argparse.Namespace) -> int:
    manifest: dict = {"kind": args.kind, "seed": getattr(args, "seed", None)}
    if args.kind == "sine":
        cloud = gen_sine(args.n)
        manifest.update(n=args.n)
    elif args.kind == "ellipse":
        cloud = gen_ellipse_partial(args.n, args.delete, args.outliers, args.outlier_sigma, args.seed)
        manifest.update(n=args.n, deletions=[list(r) for r in args.delete],
                        n_outliers=args.outliers, outlier_sigma=args.outlier_sigma)
    elif args.kind == "disk":
        cloud = gen_disk_cloud(args.n, args.seed)
        manifest.update(n=args.n)
    else:
        return _gen_pair(args)
    io.write_cloud(cloud, args.out)
    manifest["points"] = len(cloud)
    if args.manifest:
        io.write_json(manifest, args.manifest)
    return EXIT_OK


def _gen_pair(args: argparse.Namespace) -> int:
    if args.pair_kind == "sine":
        pair = sine_pair(args.n, args.rotation, args.sigma, args.seed)
    elif args.pair_kind == "ellipse":
        pair = ellipse_pair(args.n, args.delete, args.outliers, args.outlier_sigma,
                            args.rotation, args.sigma, args.seed)
    else:
        pair = shared_subset_pair(args.pool_size, args.cloud_size, args.k, args.sigma, args.seed)
    io.write_cloud(pair.X, args.out_x)
    io.write_cloud(pair.Y, args.out_y)
    if args.manifest:
        io.write_json(_pair_manifest(pair, args), args.manifest)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args: argparse.Namespace) -> int:
    if args.kind == "classify":
        params = ClassificationParams(args.n_clouds, args.cloud_size, (args.subset_min, args.subset_max),
                                      args.sigma, args.delta, args.trials, args.seed)
        report = run_classification_experiment(params, workers=args.threads)
        plot = svg.histogram_svg(report.angle_errors_deg) if args.plot else None
        summary = f"trials={report.trials} accuracy={report.accuracy} mean_error_deg={report.mean_error_deg}"
    else:
        params = SubsetParams(args.pool_size, args.cloud_size, tuple(args.k_values), args.trials_per_k,
                              args.sigma, args.delta, args.seed)
        report = run_subset_experiment(params, workers=args.threads)
        plot = svg.success_rate_svg(report.k_values, report.success_rate) if args.plot else None
        summary = " ".join(f"k={k}:{r}" for k, r in zip(report.k_values, report.success_rate))
    if args.out:
        io.write_json(report.to_dict(), args.out)
    else:
        json.dump(report.to_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    if plot is not None:
        Path(args.plot).write_text(plot)
    print(summary, file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cloudmatch", description="Maximal common subset registration of 2D point clouds.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("register", help="register two cloud files")
    r.add_argument("--cloud-x", required=True)
    r.add_argument("--cloud-y", required=True)
    r.add_argument("--delta", type=_positive_float, required=True)
    r.add_argument("--strict-delta", action="store_true", help="reject delta >= Delta/2 (exit 2)")
    r.add_argument("--all-solutions", action="store_true")
    r.add_argument("--threads", type=int, default=default_workers())
    r.add_argument("--out")
    r.add_argument("--svg")
    r.set_defaults(func=cmd_register)

    g = sub.add_parser("gen", help="generate synthetic clouds")
    gsub = g.add_subparsers(dest="kind", required=True)
    gs = gsub.add_parser("sine")
    gs.add_argument("--n", type=int, default=200)
    ge = gsub.add_parser("ellipse")
    gd = gsub.add_parser("disk")
    gd.add_argument("--n", type=int, default=150)
    for p in (gs, ge, gd):
        p.add_argument("--out", required=True)
    gp = gsub.add_parser("pair")
    gp.add_argument("--kind", dest="pair_kind", choices=("sine", "ellipse", "subset"), default="sine")
    gp.add_argument("--n", type=int, default=200)
    gp.add_argument("--rotation", type=float, default=2.0)
    gp.add_argument("--sigma", type=_nonneg_float, default=0.01)
    gp.add_argument("--pool-size", type=int, default=300)
    gp.add_argument("--cloud-size", type=int, default=150)
    gp.add_argument("--k", type=int, default=80)
    gp.add_argument("--out-x", required=True)
    gp.add_argument("--out-y", required=True)
    for p in (ge, gp):
        if p is ge:
            p.add_argument("--n", type=int, default=200)
        p.add_argument("--delete", type=_ranges, default=list(ELLIPSE_DELETIONS),
                       help="1-based inclusive ranges, e.g. 51-69,111-169")
        p.add_argument("--outliers", type=int, default=50)
        p.add_argument("--outlier-sigma", type=_nonneg_float, default=2.0)
    for p in (gs, ge, gd, gp):
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--manifest")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run the classification or subset-size experiments")
    bsub = b.add_subparsers(dest="kind", required=True)
    bc = bsub.add_parser("classify")
    bc.add_argument("--n-clouds", type=int, default=50)
    bc.add_argument("--cloud-size", type=int, default=150)
    bc.add_argument("--subset-min", type=int, default=75)
    bc.add_argument("--subset-max", type=int, default=150)
    bc.add_argument("--trials", type=int, default=50)
    bs = bsub.add_parser("subset")
    bs.add_argument("--pool-size", type=int, default=300)
    bs.add_argument("--cloud-size", type=int, default=150)
    bs.add_argument("--k-values", type=_int_list, default=list(DEFAULT_K_VALUES))
    bs.add_argument("--trials-per-k", type=int, default=20)
    for p in (bc, bs):
        p.add_argument("--sigma", type=_nonneg_float, default=0.01)
        p.add_argument("--delta", type=_positive_float, default=0.01)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--threads", type=int, default=default_workers())
        p.add_argument("--out")
        p.add_argument("--plot")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for strict-delta
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (io.CloudFormatError, CloudError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
