"""Field serialization: flat binary layout and CSV.

Binary layout: magic b"CTXF", uint32 dim, uint32 counts[dim],
float64 lengths[dim], then the node values row-major as float64.
Everything little-endian.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .elliptic import Field, Grid
from .errors import ValidationError

MAGIC = b"CTXF"


def write_field(path, f: Field) -> None:
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", g.dim))
        fh.write(struct.pack(f"<{g.dim}I", *g.counts))
        fh.write(struct.pack(f"<{g.dim}d", *g.lengths))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path) -> Field:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ValidationError("file", f"{path} is not a field binary (bad magic)")
    off = 4
    (dim,) = struct.unpack_from("<I", raw, off)
    off += 4
    counts = struct.unpack_from(f"<{dim}I", raw, off)
    off += 4 * dim
    lengths = struct.unpack_from(f"<{dim}d", raw, off)
    off += 8 * dim
    n = int(np.prod(counts))
    values = np.frombuffer(raw, dtype="<f8", count=n, offset=off).reshape(counts)
    grid = Grid(dim=dim, lengths=tuple(lengths), counts=tuple(counts))
    return Field(grid, values.copy())


def field_csv_header(grid: Grid) -> list[str]:
    return ["x", "value"] if grid.dim == 1 else ["x", "y", "value"]


def field_csv_rows(f: Field) -> list[list[float]]:
    g = f.grid
    if g.dim == 1:
        xs = g.axis_nodes(0)
        return [[x, v] for x, v in zip(xs, f.values)]
    xs, ys = g.meshes()
    return [[x, y, v] for x, y, v in zip(xs.ravel(), ys.ravel(), f.values.ravel())]
