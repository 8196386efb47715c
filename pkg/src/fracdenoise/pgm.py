"""Minimal reader/writer for 8-bit PGM images (binary P5 and ASCII P2)."""

from __future__ import annotations

import os

import numpy as np

from ._validation import InvalidArgumentError, check_image

__all__ = ["PGMParseError", "read_pgm", "write_pgm", "parse_pgm", "encode_pgm", "to_uint8"]


class PGMParseError(ValueError):
    def __init__(self, message: str, offset: int, path=None):
        self.offset = offset
        self.path = path
        where = f"{path}: " if path is not None else ""
        super().__init__(f"{where}{message} (byte offset {offset})")


_WHITESPACE = b" \t\n\r\v\f"


class _Tokenizer:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip(self) -> None:
        data = self.data
        while self.pos < len(data):
            c = data[self.pos : self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = len(data) if end < 0 else end + 1
            else:
                break

    def token(self, what: str) -> tuple[bytes, int]:
        self.skip()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos : self.pos + 1] not in _WHITESPACE + b"#":
            self.pos += 1
        if start == self.pos:
            raise PGMParseError(f"unexpected end of data while reading {what}", start)
        return self.data[start : self.pos], start

    def integer(self, what: str) -> int:
        tok, start = self.token(what)
        if not tok.isdigit():
            raise PGMParseError(f"invalid {what} {tok!r}", start)
        return int(tok)


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode PGM bytes into a float64 array of shape (height, width).

    Sample values are returned as stored; no rescaling by maxval.
    """
    tk = _Tokenizer(data)
    magic, _ = tk.token("magic number")
    if magic not in (b"P2", b"P5"):
        raise PGMParseError(f"unsupported magic number {magic!r}", 0)
    width = tk.integer("width")
    height = tk.integer("height")
    tk.skip()
    maxval_start = tk.pos
    maxval = tk.integer("maxval")
    if not 0 < maxval <= 255:
        raise PGMParseError(f"maxval {maxval} not in 1..255", maxval_start)
    if width == 0 or height == 0:
        raise PGMParseError("zero image dimension", 0)
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        if tk.pos >= len(data) or data[tk.pos : tk.pos + 1] not in _WHITESPACE:
            raise PGMParseError("missing whitespace after maxval", tk.pos)
        start = tk.pos + 1
        payload = data[start : start + count]
        if len(payload) < count:
            raise PGMParseError(
                f"truncated raster: expected {count} bytes, found {len(payload)}",
                start + len(payload),
            )
        pixels = np.frombuffer(payload, dtype=np.uint8)
        if pixels.max() > maxval:
            bad = int(np.argmax(pixels > maxval))
            raise PGMParseError(f"sample exceeds maxval {maxval}", start + bad)
    else:
        values = []
        for _ in range(count):
            try:
                tok, pos = tk.token("sample")
            except PGMParseError as exc:
                raise PGMParseError(
                    f"truncated raster: expected {count} samples, found {len(values)}", exc.offset
                ) from None
            if not tok.isdigit() or int(tok) > maxval:
                raise PGMParseError(f"invalid sample {tok!r}", pos)
            values.append(int(tok))
        pixels = np.array(values, dtype=np.uint8)
    return pixels.reshape(height, width).astype(np.float64)


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return parse_pgm(data)
    except PGMParseError as exc:
        raise PGMParseError(str(exc).rsplit(" (byte offset", 1)[0], exc.offset, os.fspath(path)) from None


def to_uint8(grid) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255]."""
    g = check_image(grid, name="grid")
    rounded = np.sign(g) * np.floor(np.abs(g) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


def encode_pgm(grid, mode: str = "P5", comment: str | None = None) -> bytes:
    if mode not in ("P2", "P5"):
        raise InvalidArgumentError(f"mode must be 'P2' or 'P5', got {mode!r}")
    pixels = to_uint8(grid)
    height, width = pixels.shape
    header = mode + "\n"
    if comment:
        header += "".join(f"# {line}\n" for line in comment.splitlines())
    header += f"{width} {height}\n255\n"
    if mode == "P5":
        return header.encode("ascii") + pixels.tobytes()
    rows = (" ".join(str(v) for v in row) for row in pixels)
    return (header + "\n".join(rows) + "\n").encode("ascii")


def write_pgm(grid, path, mode: str = "P5", comment: str | None = None) -> None:
    data = encode_pgm(grid, mode, comment)
    with open(path, "wb") as fh:
        fh.write(data)
