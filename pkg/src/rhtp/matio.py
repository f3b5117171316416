"""Matrix and vector exchange formats.

Binary layout: the 8 magic bytes ``RHTPMAT1``, two little-endian uint64
dimensions (rows, cols), then ``rows * cols`` little-endian IEEE-754 doubles
in column-major order. Vectors are stored as ``len x 1`` matrices.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .errors import ArgumentError

MAGIC = b"RHTPMAT1"
_HEADER = struct.Struct("<8sQQ")


def write_matrix(path, a) -> None:
    a = np.asarray(a, dtype="<f8")
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ArgumentError("only vectors and matrices can be written")
    rows, cols = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(np.asfortranarray(a).tobytes(order="F"))


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ArgumentError(f"{path}: truncated header")
        magic, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ArgumentError(f"{path}: bad magic {magic!r}")
        payload = fh.read()
    if len(payload) != 8 * rows * cols:
        raise ArgumentError(f"{path}: expected {rows * cols} doubles, found {len(payload) // 8}")
    return np.frombuffer(payload, dtype="<f8").reshape((rows, cols), order="F").astype(float)


def read_vector(path) -> np.ndarray:
    a = load(path)
    if a.ndim == 2 and 1 in a.shape:
        return a.reshape(-1)
    if a.ndim == 1:
        return a
    raise ArgumentError(f"{path}: expected a vector, got shape {a.shape}")


def read_csv(path) -> np.ndarray:
    a = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return a


def write_csv(path, a) -> None:
    a = np.asarray(a, dtype=float)
    np.savetxt(path, a if a.ndim == 2 else a[:, None], delimiter=",", fmt="%.17g")


def load(path) -> np.ndarray:
    """Read either format, dispatching on the file contents."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
    if magic == MAGIC:
        return read_matrix(path)
    if os.path.splitext(str(path))[1].lower() in (".csv", ".txt"):
        return read_csv(path)
    raise ArgumentError(f"{path}: neither an RHTPMAT1 file nor CSV")
