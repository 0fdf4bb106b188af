"""Minimal PGM (P2/P5) I/O.

The trainer consumes patch files through the manifest interface only, so
it carries its own small reader/writer instead of depending on the
producing package.  Samples are scaled to [0, 1] by the declared maxval.
"""

from __future__ import annotations

import re

import numpy as np

_TOKEN = re.compile(rb"^\s*(?:#[^\n]*\n\s*)*(\S+)")


class PgmError(Exception):
    pass


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"{path}: not a PGM P2/P5 file")
    values, pos = [], 2
    for _ in range(3):
        m = _TOKEN.match(data[pos:])
        if not m:
            raise PgmError(f"{path}: truncated header")
        values.append(int(m.group(1)))
        pos += m.end(1)
    w, h, maxval = values
    n = w * h
    if magic == b"P2":
        samples = np.array(data[pos:].split()[:n], dtype=np.uint32)
    else:
        body = data[pos + 1 :]
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = n * dtype.itemsize
        if len(body) < need:
            raise PgmError(f"{path}: body too short")
        samples = np.frombuffer(body[:need], dtype=dtype).astype(np.uint32)
    if samples.size != n:
        raise PgmError(f"{path}: expected {n} samples, got {samples.size}")
    return samples.reshape(h, w).astype(np.float64) / float(maxval)


def write_pgm(path: str, pixels: np.ndarray, bit_depth: int = 16) -> None:
    maxval = (1 << bit_depth) - 1
    samples = np.floor(np.clip(pixels, 0.0, 1.0) * maxval + 0.5)
    dtype = np.dtype(">u2") if bit_depth == 16 else np.dtype("u1")
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header + samples.astype(dtype).tobytes())
