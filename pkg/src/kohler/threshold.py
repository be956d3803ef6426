"""Threshold selection on a contrast curve, and the resulting segmentations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import GRAY_LEVELS, ContrastCurve, GrayImage


class NoBoundaryError(ValueError):
    """The curve has no threshold with a non-empty boundary (e.g. a constant image)."""


@dataclass(frozen=True, eq=False)
class MeanContrastCurve:
    values: np.ndarray
    defined_mask: np.ndarray

    @property
    def m(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: tuple[int, ...] = ()

    def __post_init__(self):
        ts = tuple(int(t) for t in self.thresholds)
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError(f"thresholds must be strictly increasing, got {ts}")
        if ts and not (0 <= ts[0] and ts[-1] < GRAY_LEVELS - 1):
            raise ValueError(f"thresholds must lie in [0, {GRAY_LEVELS - 1}), got {ts}")
        object.__setattr__(self, "thresholds", ts)

    def __len__(self):
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    def as_array(self) -> np.ndarray:
        return np.array(self.thresholds, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LabelImage:
    """Class index per pixel; with ``k`` thresholds labels lie in ``[0, k]``."""

    labels: np.ndarray
    k: int

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, LabelImage):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)


def mean_contrast(curve: ContrastCurve) -> MeanContrastCurve:
    """Normalise contrast sums by boundary size; empty boundaries read as 0."""
    defined = curve.cardinality > 0
    values = np.zeros(curve.m, dtype=np.float64)
    np.divide(curve.contrast_sum, curve.cardinality, out=values, where=defined)
    return MeanContrastCurve(values, defined)


def optimal_threshold(mc: MeanContrastCurve) -> int:
    """Threshold of highest mean contrast; the smallest one on ties."""
    idx = np.flatnonzero(mc.defined_mask)
    if idx.size == 0:
        raise NoBoundaryError("no boundary exists for any threshold")
    # argmax returns the first occurrence, i.e. the smallest t
    return int(idx[np.argmax(mc.values[idx])])


def local_maxima(mc: MeanContrastCurve) -> list[int]:
    """All local maxima of the defined part of the curve, in increasing t.

    Undefined thresholds are skipped, so neighbours are taken in the
    subsequence of defined entries.  A flat run counts once, at its smallest
    t, and only if the values on both sides of the run are strictly lower;
    the ends of the curve are compared on one side only.
    """
    idx = np.flatnonzero(mc.defined_mask)
    v = mc.values[idx]
    maxima = []
    start = 0
    n = v.size
    while start < n:
        stop = start
        while stop + 1 < n and v[stop + 1] == v[start]:
            stop += 1
        rises = start == 0 or v[start - 1] < v[start]
        falls = stop == n - 1 or v[stop + 1] < v[stop]
        if rises and falls:
            maxima.append(int(idx[start]))
        start = stop + 1
    return maxima


def top_k_local_maxima(mc: MeanContrastCurve, k: int) -> ThresholdSet:
    """The ``k`` local maxima of largest mean contrast, returned sorted by t.

    Fewer than ``k`` are returned when the curve does not have that many.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not mc.defined_mask.any():
        raise NoBoundaryError("no boundary exists for any threshold")
    maxima = local_maxima(mc)
    ranked = sorted(maxima, key=lambda t: (-mc.values[t], t))
    return ThresholdSet(tuple(sorted(ranked[:k])))


def classify(img: GrayImage, ts: ThresholdSet | Iterable[int]) -> LabelImage:
    """Label each pixel by the number of thresholds strictly below its value."""
    if not isinstance(ts, ThresholdSet):
        ts = ThresholdSet(tuple(ts))
    labels = np.searchsorted(ts.as_array(), img.pixels, side="left")
    return LabelImage(labels.astype(np.int32), len(ts))


def quantize(img: GrayImage, ts: ThresholdSet | Iterable[int]) -> GrayImage:
    """Replace every pixel by the mean value of its class, rounded half up."""
    lab = classify(img, ts)
    flat = lab.labels.ravel()
    counts = np.bincount(flat, minlength=lab.k + 1).astype(np.int64)
    # float64 sums are exact well beyond any realistic image size
    sums = np.rint(np.bincount(flat, weights=img.pixels.ravel(), minlength=lab.k + 1)).astype(np.int64)
    means = np.zeros(lab.k + 1, dtype=np.int64)
    nonempty = counts > 0
    means[nonempty] = (2 * sums[nonempty] + counts[nonempty]) // (2 * counts[nonempty])
    return GrayImage(means.astype(np.uint8)[lab.labels])


def labels_to_gray(lab: LabelImage) -> GrayImage:
    """Spread labels over the gray range as ``floor(255 * label / k)``."""
    if lab.k == 0:
        return GrayImage(np.zeros(lab.labels.shape, dtype=np.uint8))
    return GrayImage((255 * lab.labels.astype(np.int64)) // lab.k)
