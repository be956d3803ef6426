"""Timing harness comparing the direct, fast and parallel curve implementations.

Implementation names follow the command line: ``direct`` (D), ``fast``
(B, sequential) and ``parallel`` (A).  Timed sections cover the curve plus
its normalisation; threshold selection, decoding and file writing are
excluded.
"""

from __future__ import annotations

import io
import logging
import os
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import threshold as th
from .core import ContrastCurve, GrayImage, direct_contrast_curve, fast_contrast_curve
from .pnm import FrameSequence, save_pgm

log = logging.getLogger(__name__)

CurveFn = Callable[[GrayImage, int], ContrastCurve]

IMPLEMENTATIONS: dict[str, CurveFn] = {
    "direct": lambda img, workers: direct_contrast_curve(img),
    "fast": lambda img, workers: fast_contrast_curve(img, 1),
    "parallel": lambda img, workers: fast_contrast_curve(img, workers),
}
ALIASES = {"D": "direct", "B": "fast", "A": "parallel"}
ORDER = ("direct", "fast", "parallel")


class CurveMismatchError(RuntimeError):
    """Two implementations disagreed on the contrast curve of the same input."""


def default_workers() -> int:
    env = os.environ.get("KOHLER_WORKERS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def resolve_impls(names: Iterable[str]) -> list[str]:
    """Canonical implementation names, validated and in D, B, A order."""
    out = []
    for raw in names:
        name = ALIASES.get(raw.strip(), raw.strip())
        if name not in IMPLEMENTATIONS:
            raise ValueError(f"unknown implementation {raw!r}; choose from {', '.join(ORDER)}")
        if name not in out:
            out.append(name)
    if not out:
        raise ValueError("no implementation selected")
    return sorted(out, key=ORDER.index)


def _elapsed(start_ns: int) -> float:
    # clamp to the clock tick so recorded durations stay positive
    return max(time.perf_counter_ns() - start_ns, 1) * 1e-9


@dataclass
class BenchReport:
    image_id: str
    width: int
    height: int
    workers: int
    warmup: int
    runs: int
    durations: dict[str, list[float]] = field(default_factory=dict)

    @property
    def impls(self) -> list[str]:
        return list(self.durations)

    def median(self, impl: str) -> float:
        return statistics.median(self.durations[impl])

    def gain(self, impl: str) -> float | None:
        """Median direct duration over median ``impl`` duration (None without direct)."""
        if "direct" not in self.durations:
            return None
        return self.median("direct") / self.median(impl)


@dataclass
class VideoReport:
    frame_count: int
    width: int
    height: int
    workers: int
    seconds: dict[str, float] = field(default_factory=dict)
    decode_seconds: dict[str, float] = field(default_factory=dict)
    no_boundary_frames: dict[str, int] = field(default_factory=dict)

    def fps(self, impl: str) -> float:
        return self.frame_count / self.seconds[impl]

    def gain(self, impl: str) -> float | None:
        if "direct" not in self.seconds:
            return None
        return self.fps(impl) / self.fps("direct")


def check_agreement(img: GrayImage, impls: Sequence[str], workers: int) -> ContrastCurve:
    """Run every implementation once and fail unless all curves are identical."""
    ref_name, ref = None, None
    for name in impls:
        curve = IMPLEMENTATIONS[name](img, workers)
        if ref is None:
            ref_name, ref = name, curve
        elif curve != ref:
            raise CurveMismatchError(f"{name} and {ref_name} produce different curves")
    return ref


def bench_image(
    img: GrayImage,
    impls: Sequence[str] = ORDER,
    runs: int = 5,
    warmup: int = 1,
    workers: int | None = None,
    image_id: str = "image",
) -> BenchReport:
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    workers = default_workers() if workers is None else workers
    impls = resolve_impls(impls)
    check_agreement(img, impls, workers)

    report = BenchReport(image_id, img.width, img.height, workers, warmup, runs)
    for name in impls:
        fn = IMPLEMENTATIONS[name]
        for _ in range(warmup):
            th.mean_contrast(fn(img, workers))
        times = []
        for _ in range(runs):
            start = time.perf_counter_ns()
            th.mean_contrast(fn(img, workers))
            times.append(_elapsed(start))
        report.durations[name] = times
        log.info("%s: median %.6f s over %d runs", name, statistics.median(times), runs)
    return report


def segment_two_class(img: GrayImage, curve: ContrastCurve) -> GrayImage:
    """Quantize into two classes at the optimal threshold.

    Raises NoBoundaryError for images without any boundary.
    """
    t0 = th.optimal_threshold(th.mean_contrast(curve))
    return th.quantize(img, th.ThresholdSet((t0,)))


def bench_video(
    frames: FrameSequence | Sequence[GrayImage],
    impls: Sequence[str] = ("parallel",),
    workers: int | None = None,
    out_dir: str | os.PathLike | None = None,
) -> VideoReport:
    """Segment every frame into two classes with each implementation.

    Frames without a boundary are passed through unchanged and tallied.
    When ``out_dir`` is given, segmented frames of the last implementation
    are written there (outside the timed section).
    """
    workers = default_workers() if workers is None else workers
    impls = resolve_impls(impls)
    n = len(frames)
    if n == 0:
        raise ValueError("empty frame sequence")
    if isinstance(frames, FrameSequence):
        decode = frames.decode
        names = [p.stem for p in frames.paths]
        width, height = frames.width, frames.height
    else:
        decode = frames.__getitem__
        names = [f"frame{i:05d}" for i in range(n)]
        width, height = frames[0].width, frames[0].height
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    report = VideoReport(n, width, height, workers)
    for name in impls:
        fn = IMPLEMENTATIONS[name]
        busy = decoding = 0.0
        skipped = 0
        for i in range(n):
            start = time.perf_counter_ns()
            img = decode(i)
            decoding += _elapsed(start)

            start = time.perf_counter_ns()
            try:
                seg = segment_two_class(img, fn(img, workers))
            except th.NoBoundaryError:
                seg = img
                skipped += 1
            busy += _elapsed(start)

            if out is not None and name == impls[-1]:
                save_pgm(seg, out / f"{names[i]}.pgm")
        report.seconds[name] = busy
        report.decode_seconds[name] = decoding
        report.no_boundary_frames[name] = skipped
        if skipped:
            log.warning("%s: %d frame(s) without boundary copied through", name, skipped)
    return report


def write_report_csv(report: BenchReport) -> bytes:
    buf = io.StringIO()
    run_cols = [f"run_{i + 1}_s" for i in range(report.runs)]
    buf.write(",".join(["name", "width", "height", "runs", "median_s", *run_cols, "gain_vs_direct"]) + "\n")
    for name in report.impls:
        gain = report.gain(name)
        row = [
            name,
            str(report.width),
            str(report.height),
            str(report.runs),
            f"{report.median(name):.6f}",
            *(f"{d:.6f}" for d in report.durations[name]),
            "" if gain is None else f"{gain:.2f}",
        ]
        buf.write(",".join(row) + "\n")
    return buf.getvalue().encode("ascii")
