"""Flat binary checkpoint format for grid fields.

Byte layout, little-endian throughout:

    offset  size        content
    0       8           magic ``b"PXFLOWCK"``
    8       4           format version, uint32 (currently 1)
    12      4           spatial dimension d, uint32
    16      8*d         nodes per axis, uint64 each
    16+8d   8*d         box length per axis, float64 each
    ...     8           simulation time, float64
    ...     4           field count m, uint32
    ...     8*prod(N)   field 0, float64 row-major (C order)
    ...                 ... fields 1 .. m-1

A vector field is stored as d consecutive scalar fields (components in axis
order). Readers must reject unknown magic or version.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Grid

MAGIC = b"PXFLOWCK"
VERSION = 1


class CheckpointError(IOError):
    pass


def write_checkpoint(path, grid: Grid, time: float, fields) -> None:
    """Write scalar fields (each shaped like the grid) to ``path``."""
    fields = [np.ascontiguousarray(f, dtype="<f8") for f in fields]
    for f in fields:
        if f.shape != grid.shape:
            raise CheckpointError(
                f"field shape {f.shape} does not match grid {grid.shape}"
            )
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, grid.dim))
        fh.write(struct.pack(f"<{grid.dim}Q", *grid.nodes))
        fh.write(struct.pack(f"<{grid.dim}d", *grid.lengths))
        fh.write(struct.pack("<d", float(time)))
        fh.write(struct.pack("<I", len(fields)))
        for f in fields:
            fh.write(f.tobytes(order="C"))


def read_checkpoint(path) -> tuple[Grid, float, list[np.ndarray]]:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"bad magic in {path!r}")
    version, dim = struct.unpack_from("<II", raw, 8)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    off = 16
    nodes = struct.unpack_from(f"<{dim}Q", raw, off)
    off += 8 * dim
    lengths = struct.unpack_from(f"<{dim}d", raw, off)
    off += 8 * dim
    (time,) = struct.unpack_from("<d", raw, off)
    off += 8
    (count,) = struct.unpack_from("<I", raw, off)
    off += 4
    grid = Grid(dim, lengths, nodes)
    per_field = 8 * grid.num_nodes
    expected = off + count * per_field
    if len(raw) != expected:
        raise CheckpointError(
            f"truncated checkpoint: have {len(raw)} bytes, expected {expected}"
        )
    fields = []
    for _ in range(count):
        arr = np.frombuffer(raw, dtype="<f8", count=grid.num_nodes, offset=off)
        fields.append(arr.reshape(grid.shape).copy())
        off += per_field
    return grid, time, fields
