"""Readers and writers for the image files the pipeline consumes and emits.

Supported inputs are binary PGM (P5), binary PPM (P6) and 8-bit PNG.
Gray inputs come back as ``(H, W)`` uint8 arrays, color inputs as
``(H, W, 3)``.  Masks and maps are written as binary PGM; the pixel
payload of a PGM survives a load/save round trip byte for byte.
"""

import io

import numpy as np
from PIL import Image

from ._util import atomic_write_bytes

__all__ = ["ImageFormatError", "load_image", "read_netpbm", "read_png", "write_pgm"]


class ImageFormatError(ValueError):
    """Raised for malformed or unsupported image files, naming the bad field."""

    def __init__(self, path, detail):
        super().__init__(f"{path}: {detail}")
        self.path = str(path)
        self.detail = detail


def _read_token(stream, path, field):
    # netpbm header tokens are separated by whitespace; '#' starts a
    # comment that runs to end of line.
    token = b""
    while True:
        ch = stream.read(1)
        if not ch:
            if token:
                return token
            raise ImageFormatError(path, f"unexpected end of file while reading {field}")
        if ch == b"#":
            while ch not in (b"", b"\n"):
                ch = stream.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def _read_int(stream, path, field):
    token = _read_token(stream, path, field)
    try:
        value = int(token)
    except ValueError:
        raise ImageFormatError(path, f"malformed {field}: {token!r}") from None
    if value <= 0:
        raise ImageFormatError(path, f"{field} must be positive, got {value}")
    return value


def read_netpbm(path):
    """Read a binary PGM (P5) or PPM (P6) file.

    Returns a ``(H, W)`` uint8 array for PGM and ``(H, W, 3)`` for PPM.
    Raises ImageFormatError for bad magic numbers, malformed header
    fields, maxval above 255 (16-bit files) or a truncated payload.
    """
    with open(path, "rb") as handle:
        data = handle.read()
    stream = io.BytesIO(data)
    magic = stream.read(2)
    if magic not in (b"P5", b"P6"):
        raise ImageFormatError(path, f"unsupported magic number {magic!r} (want P5 or P6)")
    width = _read_int(stream, path, "width")
    height = _read_int(stream, path, "height")
    maxval = _read_int(stream, path, "maxval")
    if maxval > 255:
        raise ImageFormatError(path, f"unsupported bit depth: maxval {maxval} exceeds 255")
    channels = 3 if magic == b"P6" else 1
    expected = width * height * channels
    payload = stream.read(expected)
    if len(payload) < expected:
        raise ImageFormatError(
            path, f"unexpected end of pixel data ({len(payload)} of {expected} bytes)"
        )
    arr = np.frombuffer(payload, dtype=np.uint8, count=expected)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, 3).copy()


def read_png(path):
    """Read an 8-bit PNG; alpha is dropped, palettes are expanded to RGB."""
    try:
        img = Image.open(path)
        img.load()
    except OSError as exc:
        raise ImageFormatError(path, f"not a readable PNG: {exc}") from exc
    if img.mode in ("I", "I;16", "I;16B", "I;16L", "F"):
        raise ImageFormatError(path, f"unsupported bit depth: mode {img.mode} is not 8-bit")
    if img.mode == "P":
        img = img.convert("RGB")
    elif img.mode == "RGBA":
        img = img.convert("RGB")
    elif img.mode == "LA":
        img = img.convert("L")
    elif img.mode == "1":
        img = img.convert("L")
    if img.mode not in ("L", "RGB"):
        raise ImageFormatError(path, f"unsupported PNG mode {img.mode}")
    return np.asarray(img, dtype=np.uint8).copy()


def load_image(path):
    """Load PGM/PPM/PNG by sniffing the file's magic bytes.

    Returns ``(H, W)`` uint8 for gray files, ``(H, W, 3)`` for color.
    """
    try:
        with open(path, "rb") as handle:
            head = handle.read(8)
    except OSError as exc:
        raise ImageFormatError(path, f"cannot open file: {exc.strerror or exc}") from exc
    if head[:2] in (b"P5", b"P6"):
        return read_netpbm(path)
    if head[:8] == b"\x89PNG\r\n\x1a\n":
        return read_png(path)
    raise ImageFormatError(
        path, f"unrecognized format (magic bytes {head[:2]!r}); want PGM, PPM or PNG"
    )


def write_pgm(path, gray):
    """Write a ``(H, W)`` uint8 array as binary PGM, atomically."""
    arr = np.asarray(gray)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise ValueError(f"write_pgm needs a 2-D uint8 array, got {arr.dtype} {arr.shape}")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    atomic_write_bytes(path, header + arr.tobytes())
