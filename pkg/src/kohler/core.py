"""Köhler boundary-contrast curve: data types and the three implementations.

The curve is stored unnormalised, as two integer accumulators indexed by
threshold ``t``:

* ``cardinality[t]`` -- number of 4-neighbour pixel pairs straddling ``t``
  (one value ``<= t``, the other ``> t``);
* ``contrast_sum[t]`` -- sum over those pairs of ``min(hi - t, t - lo)``.

``direct_contrast_curve`` is the slow reference: one full image scan per
threshold over ordered pairs of the full 4-neighbourhood.
``fast_contrast_curve`` makes a single pass over unordered pairs of the
half neighbourhood (right, down) and spreads each pair over its whole
threshold range; with ``workers > 1`` the rows are split into contiguous
blocks, each worker owning private accumulators that are summed at the end.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels

GRAY_LEVELS = 256


class NeighborOffset(NamedTuple):
    dx: int
    dy: int


FULL_N4 = (
    NeighborOffset(1, 0),
    NeighborOffset(-1, 0),
    NeighborOffset(0, 1),
    NeighborOffset(0, -1),
)
HALF_N4 = (NeighborOffset(1, 0), NeighborOffset(0, 1))

_HALF_N4_ARRAY = np.array(HALF_N4, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit grayscale image, stored row-major as ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D pixel array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image dimensions must be positive, got {px.shape[1]}x{px.shape[0]}")
        if px.dtype != np.uint8:
            if px.dtype.kind not in "iu":
                raise TypeError(f"pixel values must be integers, got dtype {px.dtype}")
            if px.size and (px.min() < 0 or px.max() > GRAY_LEVELS - 1):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        if px is self.pixels:
            px = px.copy()
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_flat(cls, width: int, height: int, values: Sequence[int]) -> "GrayImage":
        values = np.asarray(values)
        if values.size != width * height:
            raise ValueError(f"expected {width * height} pixel values, got {values.size}")
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> int:
        return self.pixels.size

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


class BoundaryPair(NamedTuple):
    """Gray values of two neighbouring pixels, ordered as ``lo <= hi``."""

    lo: int
    hi: int

    @classmethod
    def of(cls, a: int, b: int) -> "BoundaryPair":
        return cls(min(a, b), max(a, b))

    def thresholds(self) -> range:
        return range(self.lo, self.hi)


@dataclass(eq=False)
class ContrastCurve:
    contrast_sum: np.ndarray = field(default=None)
    cardinality: np.ndarray = field(default=None)
    m: int = GRAY_LEVELS

    def __post_init__(self):
        if self.contrast_sum is None:
            self.contrast_sum = np.zeros(self.m, dtype=np.int64)
        if self.cardinality is None:
            self.cardinality = np.zeros(self.m, dtype=np.int64)
        self.contrast_sum = np.asarray(self.contrast_sum, dtype=np.int64)
        self.cardinality = np.asarray(self.cardinality, dtype=np.int64)
        if self.contrast_sum.shape != (self.m,) or self.cardinality.shape != (self.m,):
            raise ValueError(f"accumulators must have length {self.m}")

    @classmethod
    def zeros(cls, m: int = GRAY_LEVELS) -> "ContrastCurve":
        return cls(m=m)

    def copy(self) -> "ContrastCurve":
        return ContrastCurve(self.contrast_sum.copy(), self.cardinality.copy(), self.m)

    def __eq__(self, other):
        if not isinstance(other, ContrastCurve):
            return NotImplemented
        return (
            self.m == other.m
            and np.array_equal(self.contrast_sum, other.contrast_sum)
            and np.array_equal(self.cardinality, other.cardinality)
        )

    def __repr__(self):
        nz = np.flatnonzero(self.cardinality)
        span = f"t in [{nz[0]}, {nz[-1]}]" if nz.size else "empty"
        return f"ContrastCurve(m={self.m}, {span})"

    def invariant_violations(self, width: int | None = None, height: int | None = None) -> list[str]:
        """Return a description of every broken curve invariant (empty when valid).

        The pair-count bound is only checked when the image size is given.
        """
        problems = []
        cs, card = self.contrast_sum, self.cardinality
        if (cs < 0).any() or (card < 0).any():
            problems.append("negative accumulator entry")
        if (cs[card == 0] != 0).any():
            problems.append("contrast without boundary pairs")
        if (cs > card * ((self.m - 1) // 2)).any():
            problems.append("per-pair contrast bound exceeded")
        if card[self.m - 1] != 0:
            problems.append("pairs counted at the top gray level")
        if width is not None and height is not None:
            n_pairs = height * (width - 1) + (height - 1) * width
            if card.sum() > n_pairs * (self.m - 1):
                problems.append("more straddling pairs than possible")
        return problems


def pair_contribution(lo: int, hi: int, acc: ContrastCurve) -> ContrastCurve:
    """Add one boundary pair to ``acc`` in place and return it.

    Every threshold ``t`` in ``[lo, hi)`` gains ``min(hi - t, t - lo)``
    contrast and one pair; nothing changes when ``lo == hi``.
    """
    if not 0 <= lo <= hi < acc.m:
        raise ValueError(f"need 0 <= lo <= hi < {acc.m}, got lo={lo}, hi={hi}")
    _kernels.add_pair(int(lo), int(hi), acc.contrast_sum, acc.cardinality)
    return acc


def _translated_pairs(f: np.ndarray, offset: NeighborOffset):
    """Views ``(f[x], f[x + offset])`` over every x whose neighbour is in the image."""
    h, w = f.shape
    dx, dy = offset
    src = f[max(0, -dy):h - max(0, dy), max(0, -dx):w - max(0, dx)]
    dst = f[max(0, dy):h - max(0, -dy), max(0, dx):w - max(0, -dx)]
    return src, dst


def _check_levels(img: GrayImage, m: int) -> None:
    if m < GRAY_LEVELS and int(img.pixels.max()) >= m:
        raise ValueError(f"pixel values must be below m={m}")


def direct_contrast_curve(img: GrayImage, m: int = GRAY_LEVELS) -> ContrastCurve:
    """Reference curve: for each threshold, scan every ordered 4-neighbour pair.

    A pair ``(x0, x1)`` is on the boundary of ``t`` when ``f[x0] <= t < f[x1]``
    and contributes ``min(f[x1] - t, t - f[x0])``.  Deliberately naive.
    """
    _check_levels(img, m)
    f = img.pixels.astype(np.int64)
    pairs = [_translated_pairs(f, a) for a in FULL_N4]
    curve = ContrastCurve.zeros(m)
    for t in range(m):
        for f0, f1 in pairs:
            on_boundary = (f0 <= t) & (f1 > t)
            curve.cardinality[t] += np.count_nonzero(on_boundary)
            steps = np.minimum(f1[on_boundary] - t, t - f0[on_boundary])
            curve.contrast_sum[t] += steps.sum()
    return curve


def _row_blocks(height: int, n: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, height, n + 1).astype(int)
    return [(int(bounds[k]), int(bounds[k + 1])) for k in range(n)]


def _block_curve(pixels: np.ndarray, start: int, stop: int, m: int) -> ContrastCurve:
    part = ContrastCurve.zeros(m)
    if stop > start:
        _kernels.accumulate_rows(
            pixels, _HALF_N4_ARRAY, start, stop, part.contrast_sum, part.cardinality
        )
    return part


def fast_contrast_curve(img: GrayImage, workers: int = 1, m: int = GRAY_LEVELS) -> ContrastCurve:
    """Single-pass curve over the half neighbourhood, optionally multi-threaded.

    Rows are split into ``workers`` contiguous blocks (some may be empty);
    the result does not depend on ``workers``.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    _check_levels(img, m)
    blocks = _row_blocks(img.height, workers)
    if workers == 1:
        return _block_curve(img.pixels, 0, img.height, m)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda b: _block_curve(img.pixels, b[0], b[1], m), blocks))
    return merge_accumulators(parts)


def row_curve(img: GrayImage, start: int, stop: int | None = None, m: int = GRAY_LEVELS) -> ContrastCurve:
    """Partial curve of rows ``[start, stop)``.

    The down-neighbour pairs of a row belong to that row, so partials of
    disjoint row ranges covering the image merge into the full curve.
    """
    stop = start + 1 if stop is None else stop
    if not 0 <= start <= stop <= img.height:
        raise ValueError(f"row range [{start}, {stop}) outside image of height {img.height}")
    return _block_curve(img.pixels, start, stop, m)


def merge_accumulators(parts: Iterable[ContrastCurve]) -> ContrastCurve:
    parts = list(parts)
    if not parts:
        raise ValueError("no partial curves to merge")
    m = parts[0].m
    if any(p.m != m for p in parts):
        raise ValueError("cannot merge curves with different gray-level counts")
    total = ContrastCurve.zeros(m)
    for p in parts:
        total.contrast_sum += p.contrast_sum
        total.cardinality += p.cardinality
    return total
