"""Grayscale image container, binary PGM I/O and sub-pixel sampling.

Conventions used throughout the package:

* intensities are stored as float64 in [0, 1] regardless of file depth,
* pixel centers sit at integer coordinates, so the continuous sampling
  domain of a w-by-h image is [0, w-1] x [0, h-1],
* sampling outside that domain returns ``None`` instead of clamping;
  callers that need a dense evaluation consult the validity mask of the
  warp instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class PGMError(ValueError):
    """Base class for PGM decoding failures."""


class PGMUnsupportedError(PGMError):
    """File magic is not binary 'P5'."""


class PGMHeaderError(PGMError):
    """Header is malformed (dimensions or maxval missing/invalid)."""


class PGMTruncatedError(PGMError):
    """Pixel payload is shorter than width * height samples."""


class GrayImage:
    """Immutable rectangular grid of intensities in [0, 1].

    ``data`` is a read-only (height, width) float64 array; row-major with
    y down, matching file order.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("image data must be a non-empty 2-D grid")
        if np.min(arr) < 0.0 or np.max(arr) > 1.0:
            raise ValueError("intensities must lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GrayImage is immutable")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def at(self, ix: int, iy: int) -> float:
        return float(self.data[iy, ix])

    def __eq__(self, other):
        return isinstance(other, GrayImage) and np.array_equal(self.data, other.data)

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


@dataclass(frozen=True)
class Rect:
    """Integer pixel window: origin (x0, y0), positive extents (w, h)."""

    x0: int
    y0: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError("rect extents must be >= 1")


def _read_tokens(buf: bytes, count: int):
    """Pull `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the first payload byte (one
    whitespace byte after the last token, per the PNM convention).
    """
    tokens = []
    i = 0
    n = len(buf)
    while len(tokens) < count:
        while i < n and buf[i : i + 1].isspace():
            i += 1
        if i < n and buf[i] == ord("#"):
            while i < n and buf[i] not in (10, 13):
                i += 1
            continue
        start = i
        while i < n and not buf[i : i + 1].isspace():
            i += 1
        if i == start:
            raise PGMHeaderError("unexpected end of header")
        tokens.append(buf[start:i])
    if i >= n or not buf[i : i + 1].isspace():
        raise PGMHeaderError("missing whitespace after header")
    return tokens, i + 1


def load_pgm(path) -> GrayImage:
    """Read a binary PGM (magic P5), scaling intensities by 1/maxval."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if buf[:2] != b"P5":
        raise PGMUnsupportedError(f"unsupported magic {buf[:2]!r}, expected b'P5'")
    try:
        tokens, offset = _read_tokens(buf[2:], 3)
    except PGMHeaderError:
        raise
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise PGMHeaderError(f"non-numeric header field: {exc}") from None
    if width < 1 or height < 1:
        raise PGMHeaderError(f"invalid dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise PGMHeaderError(f"maxval {maxval} outside (0, 65535]")
    payload = buf[2 + offset :]
    bytes_per = 2 if maxval > 255 else 1
    need = width * height * bytes_per
    if len(payload) < need:
        raise PGMTruncatedError(f"expected {need} payload bytes, found {len(payload)}")
    dtype = ">u2" if bytes_per == 2 else np.uint8
    raw = np.frombuffer(payload[:need], dtype=dtype).reshape(height, width)
    return GrayImage(raw.astype(np.float64) / maxval)


def save_pgm(img: GrayImage, path) -> None:
    """Write a binary PGM with maxval 255; intensities quantized round-half-up."""
    # np.round is round-half-even; the stated rule is round-half-up (0.5 -> 128)
    quantized = np.floor(img.data * 255.0 + 0.5).astype(np.uint8)
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(quantized.tobytes())


def sample_bilinear(img: GrayImage, x: float, y: float):
    """Bilinear interpolation at continuous (x, y); None outside the domain."""
    w, h = img.width, img.height
    if not (0.0 <= x <= w - 1 and 0.0 <= y <= h - 1):
        return None
    ix = int(x)
    iy = int(y)
    if ix > w - 2:
        ix = max(w - 2, 0)
    if iy > h - 2:
        iy = max(h - 2, 0)
    fx = x - ix
    fy = y - iy
    d = img.data
    x1 = min(ix + 1, w - 1)
    y1 = min(iy + 1, h - 1)
    top = (1.0 - fx) * d[iy, ix] + fx * d[iy, x1]
    bot = (1.0 - fx) * d[y1, ix] + fx * d[y1, x1]
    return float((1.0 - fy) * top + fy * bot)


def crop(img: GrayImage, r: Rect) -> GrayImage:
    """Exact sub-grid copy; the rect must lie fully inside the image."""
    if r.x0 < 0 or r.y0 < 0 or r.x0 + r.w > img.width or r.y0 + r.h > img.height:
        raise ValueError(f"rect {r} out of bounds for {img.width}x{img.height} image")
    return GrayImage(img.data[r.y0 : r.y0 + r.h, r.x0 : r.x0 + r.w].copy())
