"""Binary Netpbm reader/writer: 8-bit P5 graymaps and P6 pixmaps, maxval 255."""

from __future__ import annotations

import numpy as np

from .core import Image


class PnmParseError(ValueError):
    """Malformed or unsupported Netpbm data; carries the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def _next_token(buf: bytes, pos: int):
    """Scan past whitespace and '#' comments; return (token, end_pos)."""
    n = len(buf)
    while pos < n:
        c = buf[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c == ord("#"):
            while pos < n and buf[pos] != ord("\n"):
                pos += 1
        else:
            break
    if pos >= n:
        raise PnmParseError("unexpected end of header", pos)
    start = pos
    while pos < n and buf[pos] not in b" \t\r\n":
        pos += 1
    return buf[start:pos], pos


def _int_token(buf, pos, what):
    tok, end = _next_token(buf, pos)
    try:
        value = int(tok)
    except ValueError:
        raise PnmParseError(f"invalid {what} {tok!r}", pos) from None
    if value <= 0:
        raise PnmParseError(f"{what} must be positive, got {value}", pos)
    return value, end


def load_image(path) -> Image:
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, pos = _next_token(buf, 0)
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmParseError(f"unsupported magic {magic!r}; need binary P5 or P6", 0)
    width, pos = _int_token(buf, pos, "width")
    height, pos = _int_token(buf, pos, "height")
    maxval, pos = _int_token(buf, pos, "maxval")
    if maxval != 255:
        raise PnmParseError(f"only maxval 255 is supported, got {maxval}", pos)
    if pos >= len(buf) or buf[pos] not in b" \t\r\n":
        raise PnmParseError("missing whitespace after maxval", pos)
    pos += 1  # exactly one whitespace byte separates header from payload
    need = width * height * channels
    payload = buf[pos:pos + need]
    if len(payload) < need:
        raise PnmParseError(
            f"truncated payload: expected {need} bytes, found {len(payload)}",
            pos + len(payload))
    raw = np.frombuffer(payload, dtype=np.uint8, count=need)
    pixels = raw.astype(np.float64).reshape(height, width, channels) / 255.0
    return Image(pixels)


def save_image(img: Image, path) -> None:
    magic = b"P5" if img.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    quantized = np.round(img.pixels * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(quantized.tobytes())
