"""FLD1 field files and atomic output helpers.

Layout (little endian): 8-byte magic ``FLD1\\0\\0\\0\\0``, ``u32`` dim,
``dim`` x ``u32`` axis sizes, ``u32`` component count, then the physical
values of each component as row-major ``float64``.
"""
from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .core import Grid, ScalarField, VectorField

MAGIC = b"FLD1\0\0\0\0"


class FieldFileError(ValueError):
    """Raised for files that are not well-formed FLD1."""


def atomic_write_bytes(path, data: bytes):
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def encode_field(f: ScalarField | VectorField) -> bytes:
    g = f.grid
    vals = f.values if isinstance(f, VectorField) else f.values[None]
    header = MAGIC + struct.pack(f"<I{g.dim}II", g.dim, *g.shape, vals.shape[0])
    return header + np.ascontiguousarray(vals, dtype="<f8").tobytes()


def decode_field(data: bytes, name: str = "<bytes>") -> ScalarField | VectorField:
    if len(data) < 12 or data[:8] != MAGIC:
        raise FieldFileError(f"{name}: not an FLD1 file (bad magic)")
    dim = struct.unpack_from("<I", data, 8)[0]
    if dim not in (2, 3):
        raise FieldFileError(f"{name}: dimension {dim} unsupported (need 2 or 3)")
    need = 12 + 4 * dim + 4
    if len(data) < need:
        raise FieldFileError(f"{name}: truncated header")
    sizes = struct.unpack_from(f"<{dim}I", data, 12)
    ncomp = struct.unpack_from("<I", data, 12 + 4 * dim)[0]
    if len(set(sizes)) != 1:
        raise FieldFileError(f"{name}: axis sizes {sizes} differ; only cubic grids are supported")
    if ncomp not in (1, dim):
        raise FieldFileError(f"{name}: {ncomp} components; expected 1 or {dim}")
    count = ncomp * int(np.prod(sizes))
    if len(data) != need + 8 * count:
        raise FieldFileError(f"{name}: payload is {len(data) - need} bytes, expected {8 * count}")
    try:
        grid = Grid(dim, sizes[0])
    except ValueError as exc:
        raise FieldFileError(f"{name}: {exc}") from None
    vals = np.frombuffer(data, dtype="<f8", count=count, offset=need).astype(float)
    vals = vals.reshape((ncomp,) + grid.shape)
    if not np.all(np.isfinite(vals)):
        raise FieldFileError(f"{name}: non-finite samples")
    if ncomp == 1:
        return ScalarField(grid, vals[0].copy())
    return VectorField.from_array(grid, vals.copy())


def write_field(path, f: ScalarField | VectorField):
    atomic_write_bytes(path, encode_field(f))


def read_field(path) -> ScalarField | VectorField:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FieldFileError(f"{path}: cannot read ({exc.strerror})") from None
    return decode_field(data, str(path))
