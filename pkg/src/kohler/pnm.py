"""Portable anymap reading/writing (PGM P2/P5, PPM P3/P6, maxval <= 255).

Color images are reduced to luma ``round(0.299 R + 0.587 G + 0.114 B)``,
rounding halves up.  Samples of images with ``maxval < 255`` are kept as is.
"""

from __future__ import annotations

import fnmatch
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .core import GrayImage


class PnmError(ValueError):
    """Base class for undecodable anymap data."""


class BadMagicError(PnmError):
    pass


class MalformedHeaderError(PnmError):
    pass


class MaxvalError(PnmError):
    pass


class ZeroDimensionError(PnmError):
    pass


class TruncatedDataError(PnmError):
    pass


class SampleRangeError(PnmError):
    pass


class FrameSequenceError(ValueError):
    pass


class PnmHeader(NamedTuple):
    magic: bytes
    width: int
    height: int
    maxval: int
    data_offset: int

    @property
    def channels(self) -> int:
        return 3 if self.magic in (b"P3", b"P6") else 1

    @property
    def binary(self) -> bool:
        return self.magic in (b"P5", b"P6")


_MAGICS = (b"P2", b"P3", b"P5", b"P6")
_WHITESPACE = b" \t\n\r\v\f"
_HASH = ord("#")
_COMMENT = re.compile(rb"#[^\r\n]*")


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Read one whitespace-delimited token, skipping ``#`` comments."""
    n = len(data)
    while pos < n:
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == _HASH:
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != _HASH:
        pos += 1
    return data[start:pos], pos


def read_pnm_header(data: bytes) -> PnmHeader:
    magic = data[:2]
    if magic not in _MAGICS:
        raise BadMagicError(f"unsupported magic number {magic!r}")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _next_token(data, pos)
        if not tok:
            raise TruncatedDataError(f"header ends before {name}")
        if not tok.isdigit():
            raise MalformedHeaderError(f"{name} is not a decimal integer: {tok[:16]!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width == 0 or height == 0:
        raise ZeroDimensionError(f"image has zero dimension: {width}x{height}")
    if maxval == 0 or maxval > 255:
        raise MaxvalError(f"maxval must be in [1, 255], got {maxval}")
    # binary rasters start after exactly one whitespace byte
    if magic in (b"P5", b"P6"):
        if pos >= len(data):
            raise TruncatedDataError("no pixel data after header")
        pos += 1
    return PnmHeader(magic, width, height, maxval, pos)


def _luma(rgb: np.ndarray) -> np.ndarray:
    r, g, b = (rgb[..., c].astype(np.int64) for c in range(3))
    return np.minimum((299 * r + 587 * g + 114 * b + 500) // 1000, 255)


def read_pnm(data: bytes) -> GrayImage:
    """Decode a PGM or PPM byte string into a grayscale image."""
    hdr = read_pnm_header(data)
    count = hdr.width * hdr.height * hdr.channels
    if hdr.binary:
        raw = data[hdr.data_offset:hdr.data_offset + count]
        if len(raw) < count:
            raise TruncatedDataError(f"expected {count} samples, found {len(raw)}")
        samples = np.frombuffer(raw, dtype=np.uint8)
    else:
        tokens = _COMMENT.sub(b" ", data[hdr.data_offset:]).split()
        if len(tokens) < count:
            raise TruncatedDataError(f"expected {count} samples, found {len(tokens)}")
        try:
            samples = np.array([int(t) for t in tokens[:count]], dtype=np.int64)
        except ValueError:
            raise MalformedHeaderError("non-integer sample in ASCII raster") from None
    if samples.max(initial=0) > hdr.maxval:
        raise SampleRangeError(f"sample value exceeds maxval {hdr.maxval}")
    if hdr.channels == 3:
        gray = _luma(samples.reshape(hdr.height, hdr.width, 3))
    else:
        gray = samples.reshape(hdr.height, hdr.width)
    return GrayImage(gray.astype(np.uint8))


def write_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load_image(path: str | os.PathLike) -> GrayImage:
    return read_pnm(Path(path).read_bytes())


def save_pgm(img: GrayImage, path: str | os.PathLike) -> None:
    Path(path).write_bytes(write_pgm(img))


def _peek_header(path: Path) -> PnmHeader:
    # generous prefix: header plus comments rarely exceeds a few hundred bytes
    with open(path, "rb") as fh:
        head = fh.read(4096)
    try:
        return read_pnm_header(head)
    except TruncatedDataError:
        return read_pnm_header(path.read_bytes())


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frame files; every frame decodes to the same dimensions."""

    paths: tuple[Path, ...]
    width: int
    height: int

    def __len__(self):
        return len(self.paths)

    def decode(self, index: int) -> GrayImage:
        path = self.paths[index]
        try:
            img = load_image(path)
        except PnmError as exc:
            raise FrameSequenceError(f"{path.name}: {exc}") from exc
        if (img.width, img.height) != (self.width, self.height):
            raise FrameSequenceError(
                f"{path.name}: size {img.width}x{img.height} differs from "
                f"{self.width}x{self.height}"
            )
        return img

    def __iter__(self) -> Iterator[GrayImage]:
        for i in range(len(self.paths)):
            yield self.decode(i)


def frame_sequence(directory: str | os.PathLike, pattern: str = "*.pgm") -> FrameSequence:
    """Collect the frames in ``directory`` matching ``pattern``, sorted by filename.

    Headers are checked up front so a size mismatch is reported before any
    processing starts; pixel data is decoded lazily on iteration.
    """
    root = Path(directory)
    if not root.is_dir():
        raise FrameSequenceError(f"not a directory: {root}")
    names = sorted(n for n in os.listdir(root) if fnmatch.fnmatch(n, pattern) and (root / n).is_file())
    if not names:
        raise FrameSequenceError(f"no files matching {pattern!r} in {root}")
    paths = tuple(root / n for n in names)
    width = height = None
    for p in paths:
        try:
            hdr = _peek_header(p)
        except PnmError as exc:
            raise FrameSequenceError(f"{p.name}: {exc}") from exc
        if width is None:
            width, height = hdr.width, hdr.height
        elif (hdr.width, hdr.height) != (width, height):
            raise FrameSequenceError(
                f"{p.name}: size {hdr.width}x{hdr.height} differs from {width}x{height}"
            )
    return FrameSequence(paths, width, height)
