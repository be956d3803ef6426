"""Command line: ``kohler {curve,segment,bench,video}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from . import threshold as th
from .core import fast_contrast_curve
from .pnm import FrameSequenceError, PnmError, frame_sequence, load_image, save_pgm

class CliError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _impl_list(text: str) -> list[str]:
    try:
        return bench.resolve_impls(text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(path: str):
    try:
        return load_image(path)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}") from None
    except PnmError as exc:
        raise CliError(f"{path}: {exc}") from None


def curve_csv(curve) -> bytes:
    mc = th.mean_contrast(curve)
    lines = ["t,cardinality,contrast_sum,mean_contrast"]
    for t in range(curve.m):
        lines.append(f"{t},{curve.cardinality[t]},{curve.contrast_sum[t]},{mc.values[t]:.6f}")
    return ("\n".join(lines) + "\n").encode("ascii")


def cmd_curve(args) -> int:
    img = _load(args.input)
    data = curve_csv(fast_contrast_curve(img, args.workers))
    if args.out in (None, "-"):
        sys.stdout.write(data.decode("ascii"))
    else:
        Path(args.out).write_bytes(data)
    return 0


def cmd_segment(args) -> int:
    img = _load(args.input)
    mc = th.mean_contrast(fast_contrast_curve(img, args.workers))
    try:
        ts = th.top_k_local_maxima(mc, args.k)
    except th.NoBoundaryError:
        raise CliError(f"{args.input}: no boundary (constant image)") from None
    if len(ts) < args.k:
        print(f"kohler: warning: only {len(ts)} local maxima available, using all of them",
              file=sys.stderr)
    if args.labels:
        out = th.labels_to_gray(th.classify(img, ts))
    else:
        out = th.quantize(img, ts)
    save_pgm(out, args.out)
    for t in ts:
        print(t)
    return 0


def cmd_bench(args) -> int:
    img = _load(args.input)
    try:
        report = bench.bench_image(
            img, args.impl, runs=args.runs, warmup=args.warmup,
            workers=args.workers, image_id=Path(args.input).name,
        )
    except bench.CurveMismatchError as exc:
        raise CliError(f"correctness failure: {exc}") from None
    Path(args.out).write_bytes(bench.write_report_csv(report))
    print(f"{report.image_id}: {report.width}x{report.height}, {report.runs} runs, "
          f"{report.warmup} warmup, {report.workers} workers")
    for name in report.impls:
        gain = report.gain(name)
        extra = "" if gain is None or name == "direct" else f"  gain vs direct {gain:.2f}"
        print(f"  {name:<9} median {report.median(name):.6f} s{extra}")
    return 0


def cmd_video(args) -> int:
    try:
        frames = frame_sequence(args.frames, args.pattern)
        report = bench.bench_video(frames, [args.impl], workers=args.workers, out_dir=args.out)
    except FrameSequenceError as exc:
        raise CliError(str(exc)) from None
    for name in report.seconds:
        print(f"{name}: {report.frame_count} frames {report.width}x{report.height} "
              f"in {report.seconds[name]:.3f} s, {report.fps(name):.2f} frames/s "
              f"(decode {report.decode_seconds[name]:.3f} s excluded)")
        if report.no_boundary_frames[name]:
            print(f"  {report.no_boundary_frames[name]} frame(s) without boundary passed through")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kohler", description="Köhler boundary-contrast thresholding")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_workers(p):
        p.add_argument("--workers", type=_positive_int, default=None,
                       help="worker threads (default: $KOHLER_WORKERS or CPU count)")

    p = sub.add_parser("curve", help="write the contrast curve as CSV")
    p.add_argument("input")
    p.add_argument("--out", help="CSV path (default: standard output)")
    add_workers(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("segment", help="multi-threshold an image")
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output PGM path")
    p.add_argument("--k", type=_positive_int, default=1, help="number of thresholds")
    p.add_argument("--labels", action="store_true", help="write class labels instead of class means")
    add_workers(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("bench", help="time the curve implementations")
    p.add_argument("input")
    p.add_argument("--impl", type=_impl_list, default=list(bench.ORDER),
                   help="comma-separated subset of direct,fast,parallel")
    p.add_argument("--runs", type=_positive_int, default=5)
    p.add_argument("--warmup", type=_nonnegative_int, default=1)
    p.add_argument("--out", default="bench.csv", help="CSV report path (default: bench.csv)")
    add_workers(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("video", help="two-class segmentation of a frame sequence")
    p.add_argument("frames", help="directory of PGM/PPM frames")
    p.add_argument("--pattern", default="*.pgm")
    p.add_argument("--out", help="directory for segmented frames")
    p.add_argument("--impl", choices=bench.ORDER, default="parallel")
    add_workers(p)
    p.set_defaults(func=cmd_video)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.workers is None:
        try:
            args.workers = bench.default_workers()
        except ValueError:
            parser.error("KOHLER_WORKERS must be an integer")
        if args.workers < 1:
            parser.error("KOHLER_WORKERS must be >= 1")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"kohler: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"kohler: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
