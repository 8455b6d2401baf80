"""Command-line orchestration of the two-stage pipeline.

Exit codes: 0 success, 2 bad input (missing files, mismatched grids, invalid
flags), 3 degenerate case (e.g. an empty boundary band).  All commands are
deterministic: identical inputs and flags produce byte-identical outputs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import losses
from .metrics import render_rows_json, render_table
from .pipeline import (
    evaluate_dirs,
    stage1_post,
    write_bundle,
    write_case,
    write_stage1,
)
from .synth import DEFAULT_DIMS, DEFAULT_SPACING, make_case, make_outlier_case
from .uam import UamStats, entropy_sum, fit_population, read_entropy_manifest
from .volume import DegenerateInputError, FormatError, Spacing, read_volume, write_volume

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_DEGENERATE = 3


def _parse_triple(text: str, cast):
    parts = [cast(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(parts)


def _dims(text: str):
    return _parse_triple(text, int)


def _spacing(text: str):
    return Spacing(*_parse_triple(text, float))


def cmd_synth(args) -> int:
    if args.outlier:
        rec = make_outlier_case(args.seed, args.dims, args.spacing)
    else:
        rec = make_case(args.seed, args.dims, args.spacing, corruption=args.corruption)
    write_case(rec, args.out)
    print(f"case_id={rec.case_id}")
    return EXIT_OK


def cmd_stage1_post(args) -> int:
    prob = read_volume(args.in_path)
    stats = UamStats.load(args.stats)
    result = stage1_post(prob, stats)
    write_stage1(result, args.out)
    print(f"entropy_sum={result.entropy:.6f}")
    print(f"threshold={result.threshold:g}")
    return EXIT_OK


def cmd_stage2_prep(args) -> int:
    image = read_volume(args.image)
    dm = read_volume(args.dm)
    write_bundle(image, dm, args.out)
    print(f"bundle={Path(args.out).with_suffix('.json')}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    report = evaluate_dirs(args.pred, args.gt, jobs=args.jobs)
    table = render_table(report)
    sys.stdout.write(table)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(table)
        (out / "report.jsonl").write_text(render_rows_json(report))
    return EXIT_OK


def cmd_loss_eval(args) -> int:
    s = read_volume(args.pred)
    g = read_volume(args.gt)
    ks = [float(k) for k in args.k.split(",")]
    ce = losses.cross_entropy(s, g)
    dice = losses.dice_loss(s, g)
    print(f"ce={ce.value:.9f}")
    print(f"dice={dice.value:.9f}")
    for k in ks:
        cfg = losses.TopKConfig(k_percent=k)
        topk = losses.topk_loss(s, g, cfg)
        combined = losses.combined_loss(s, g, cfg)
        print(f"topk[k={k:g}]={topk.value:.9f} combined[k={k:g}]={combined.value:.9f}")
        if args.export_focus:
            focus = losses.topk_focus_mask(s, g, cfg)
            out = Path(args.export_focus)
            out.mkdir(parents=True, exist_ok=True)
            write_volume(focus, out / f"focus_k{k:g}")
    return EXIT_OK


def cmd_uam_fit(args) -> int:
    if args.manifest:
        entries = read_entropy_manifest(args.manifest)
    else:
        if not args.in_path:
            raise ValueError("uam-fit needs --in or --manifest")
        entries = {
            p.stem: entropy_sum(read_volume(p))
            for p in sorted(Path(args.in_path).glob("*.json"))
        }
    entropies = [entries[cid] for cid in sorted(entries)]
    stats = fit_population(entropies, sigma_factor=args.sigma_factor)
    stats.save(args.out)
    print(f"mean={stats.mean:.6f}")
    print(f"std={stats.std:.6f}")
    print(f"n={stats.n_cases}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="laseg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic case directory")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dims", type=_dims, default=DEFAULT_DIMS)
    p.add_argument("--spacing", type=_spacing, default=DEFAULT_SPACING)
    p.add_argument("--corruption", type=float, default=0.1)
    p.add_argument("--outlier", action="store_true")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("stage1-post", help="UAM mask, boundary band, signed distance map")
    p.add_argument("--in", dest="in_path", required=True, help="LA probability .bvol")
    p.add_argument("--stats", required=True, help="UAM stats file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_stage1_post)

    p = sub.add_parser("stage2-prep", help="bundle image + distance map for stage 2")
    p.add_argument("--image", required=True)
    p.add_argument("--dm", required=True)
    p.add_argument("--out", required=True, help="bundle base path")
    p.set_defaults(func=cmd_stage2_prep)

    p = sub.add_parser("evaluate", help="Dice/HD/ASD report over matching case dirs")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", default=None, help="directory for report.txt/report.jsonl")
    p.add_argument("--jobs", type=int, default=0, help="worker threads (0 = all cores)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("loss-eval", help="print CE/Dice/TopK/combined loss values")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--k", default="100,20,10,5")
    p.add_argument("--export-focus", default=None, help="directory for TopK focus masks")
    p.set_defaults(func=cmd_loss_eval)

    p = sub.add_parser("uam-fit", help="fit entropy population stats")
    p.add_argument("--in", dest="in_path", default=None, help="directory of probability .bvol files")
    p.add_argument("--manifest", default=None, help="precomputed 'case_id entropy' lines")
    p.add_argument("--out", required=True, help="stats file to write")
    p.add_argument("--sigma-factor", type=float, default=3.0)
    p.set_defaults(func=cmd_uam_fit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", None) == 0:
        import os

        args.jobs = os.cpu_count() or 1
    try:
        return args.func(args)
    except DegenerateInputError as e:
        print(f"error: degenerate input: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (FormatError, ValueError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
