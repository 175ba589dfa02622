"""Binary PGM (P5) / PPM (P6) reader and writer, 8-bit, maxval 255.

The only image formats this package touches: dependency-free and
bit-exactly specifiable.  Values map linearly 0..255 <-> 0.0..1.0;
writing clips to [0, 1] and rounds half away from zero, so write o read
is lossless for already-quantized data.
"""

import numpy as np


class PnmError(ValueError):
    """Malformed netpbm file; message carries the byte position."""


def _read_token(buf, pos):
    n = len(buf)
    while pos < n and buf[pos:pos + 1].isspace():
        pos += 1
    if pos >= n:
        raise PnmError(f"unexpected end of header at byte {pos}")
    start = pos
    while pos < n and not buf[pos:pos + 1].isspace():
        pos += 1
    return buf[start:pos], pos


def read_image(path):
    """Read a P5/P6 file into a float64 image in [0, 1]."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, pos = _read_token(buf, 0)
    if magic == b"P5":
        nchan = 1
    elif magic == b"P6":
        nchan = 3
    else:
        raise PnmError(f"unsupported magic {magic!r} at byte 0 (want P5 or P6)")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(buf, pos)
        if not tok.isdigit():
            raise PnmError(f"non-numeric header token {tok!r} before byte {pos}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmError(f"invalid dimensions {width}x{height} in header")
    if maxval != 255:
        raise PnmError(f"maxval {maxval} unsupported (only 255) before byte {pos}")
    # exactly one whitespace byte separates header from payload
    if pos >= len(buf) or not buf[pos:pos + 1].isspace():
        raise PnmError(f"missing whitespace after header at byte {pos}")
    pos += 1
    need = width * height * nchan
    payload = buf[pos:pos + need]
    if len(payload) < need:
        raise PnmError(
            f"truncated payload: need {need} bytes at byte {pos}, have {len(payload)}"
        )
    data = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    if nchan == 1:
        return data.reshape(height, width)
    return data.reshape(height, width, 3)


def write_image(image, path):
    """Write a float image to P5 (grayscale) or P6 (color)."""
    x = np.asarray(image, dtype=np.float64)
    if x.ndim == 2:
        magic, nchan = b"P5", 1
    elif x.ndim == 3 and x.shape[2] == 3:
        magic, nchan = b"P6", 3
    else:
        raise ValueError(f"cannot serialize image of shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot serialize non-finite pixel values")
    h, w = x.shape[0], x.shape[1]
    q = np.clip(np.round(np.clip(x, 0.0, 1.0) * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(magic + b" " + f"{w} {h} 255".encode("ascii") + b"\n")
        fh.write(q.tobytes())


def quantize(image):
    """Round-trip an image through the 8-bit grid without touching disk."""
    x = np.asarray(image, dtype=np.float64)
    return np.clip(np.round(np.clip(x, 0.0, 1.0) * 255.0), 0, 255) / 255.0
