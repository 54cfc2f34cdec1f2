"""Binary tensor files (RBT1) and binary PPM frames.

RBT1 layout, all little-endian::

    b"RBT1" | u32 version (=1) | u64 n1 | u64 n2 | u64 n3 |
    n1*n2*n3 entries of four float64 (q0, q1, q2, q3)

Entries are ordered with the slice index outermost, then the column,
then the row.
"""
import os
import re
import struct
import tempfile
from pathlib import Path

import numpy as np

from rbtensor.tensor import RBTensor

MAGIC = b"RBT1"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")
FRAME_PATTERN = "frame_{:06d}.ppm"
_FRAME_RE = re.compile(r"frame_(\d{6})\.ppm$")


class FormatError(ValueError):
    """Malformed input file; ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=None, path=None):
        self.offset = offset
        self.path = path
        where = "" if offset is None else f" at byte offset {offset}"
        src = "" if path is None else f"{path}: "
        super().__init__(f"{src}{message}{where}")


def atomic_write(path, data):
    """Write ``data`` (bytes or str) to ``path`` through a temp file and rename."""
    path = Path(path)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def tensor_to_bytes(t):
    n1, n2, n3 = t.shape
    body = np.ascontiguousarray(t.components().transpose(2, 1, 0, 3), dtype="<f8")
    return _HEADER.pack(MAGIC, VERSION, n1, n2, n3) + body.tobytes()


def tensor_from_bytes(data, path=None):
    if len(data) < 4 or data[:4] != MAGIC:
        raise FormatError(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}", 0, path)
    if len(data) < _HEADER.size:
        raise FormatError("truncated header", len(data), path)
    _, version, n1, n2, n3 = _HEADER.unpack_from(data)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4, path)
    if min(n1, n2, n3) == 0:
        raise FormatError(f"zero dimension in ({n1}, {n2}, {n3})", 8, path)
    expected = _HEADER.size + 32 * n1 * n2 * n3
    if len(data) != expected:
        raise FormatError(f"payload length mismatch: file has {len(data)} bytes, "
                          f"header implies {expected}", min(len(data), expected), path)
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(n3, n2, n1, 4)
    comps = body.transpose(2, 1, 0, 3).astype(np.float64)
    if not np.all(np.isfinite(comps)):
        bad = int(np.flatnonzero(~np.isfinite(body.ravel()))[0])
        raise FormatError("non-finite value", _HEADER.size + 8 * bad, path)
    return RBTensor.from_components(comps)


def write_tensor(path, t):
    atomic_write(path, tensor_to_bytes(t))


def read_tensor(path):
    return tensor_from_bytes(Path(path).read_bytes(), path=str(path))


def _ppm_token(data, pos, path):
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of PPM header", start, path)
    return data[start:pos], pos


def decode_ppm(data, path=None):
    """Parse a binary P6 image into an ``(h, w, 3)`` uint8 array."""
    if data[:2] != b"P6":
        raise FormatError(f"bad PPM magic {bytes(data[:2])!r}, expected b'P6'", 0, path)
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        tok, new = _ppm_token(data, pos, path)
        if not tok.isdigit():
            raise FormatError(f"PPM {name} is not a number: {tok!r}", new - len(tok), path)
        fields.append(int(tok))
        pos = new
    w, h, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255)", pos - len(str(maxval)), path)
    if w == 0 or h == 0:
        raise FormatError("zero image dimension", pos, path)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after PPM header", pos, path)
    pos += 1
    size = w * h * 3
    if len(data) - pos != size:
        raise FormatError(f"pixel data is {len(data) - pos} bytes, expected {size}", pos, path)
    return np.frombuffer(data, dtype=np.uint8, offset=pos).reshape(h, w, 3).copy()


def encode_ppm(img):
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError(f"expected an (h, w, 3) uint8 image, got {img.shape} {img.dtype}")
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img).tobytes()


def read_ppm(path):
    return decode_ppm(Path(path).read_bytes(), path=str(path))


def write_ppm(path, img):
    atomic_write(path, encode_ppm(img))


def frame_paths(directory):
    """Frame files of ``directory`` in index order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"not a directory: {directory}")
    found = sorted((int(m.group(1)), p) for p in directory.iterdir()
                   if (m := _FRAME_RE.fullmatch(p.name)))
    return [p for _, p in found]


def read_frames(directory):
    """All ``frame_NNNNNN.ppm`` files of ``directory`` as a ``(t, h, w, 3)`` uint8 array."""
    paths = frame_paths(directory)
    if not paths:
        raise FormatError(f"no frame_NNNNNN.ppm files in {directory}")
    frames = [read_ppm(paths[0])]
    for p in paths[1:]:
        img = read_ppm(p)
        if img.shape != frames[0].shape:
            raise FormatError(f"frame size {img.shape[1]}x{img.shape[0]} differs from "
                              f"{frames[0].shape[1]}x{frames[0].shape[0]}", path=str(p))
        frames.append(img)
    return np.stack(frames)


def write_frames(directory, frames):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, img in enumerate(frames):
        write_ppm(directory / FRAME_PATTERN.format(i), img)
