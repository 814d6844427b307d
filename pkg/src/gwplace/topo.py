"""Node topologies: random uniform rectangles and CSV persistence."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import IO, Iterator, NamedTuple, Union

import numpy as np

PathOrStream = Union[str, os.PathLike, IO[str]]

CSV_HEADER = ("id", "x", "y")

_U64 = (1 << 64) - 1


class TopologyParseError(ValueError):
    """Raised for malformed topology CSV input; carries the offending line."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class Node(NamedTuple):
    id: int
    x: float
    y: float


@dataclass(eq=False)
class Topology:
    """Ordered station candidates with planar coordinates in meters.

    Node ids are the row indices of ``coords``. ``area_width`` and
    ``area_height`` are only known for generated topologies; loaded ones
    leave them as ``None``.
    """

    coords: np.ndarray
    area_width: float | None = None
    area_height: float | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(self.coords)):
            raise ValueError("coordinates must be finite")

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __iter__(self) -> Iterator[Node]:
        for i, (x, y) in enumerate(self.coords.tolist()):
            yield Node(i, x, y)

    @property
    def nodes(self) -> list[Node]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return self.coords.shape == other.coords.shape and bool(
            np.array_equal(self.coords, other.coords)
        )


def make_rng(seed: int) -> np.random.Generator:
    """Philox counter-based generator; negative seeds are taken mod 2**64."""
    return np.random.Generator(np.random.Philox(int(seed) & _U64))


def generate_topology(n: int, width: float, height: float, seed: int) -> Topology:
    """Place ``n`` nodes uniformly at random in ``[0, width] x [0, height]``.

    The output is a pure function of the arguments. Because ``x`` is drawn as
    ``width * U`` from the same stream, two calls that differ only in the
    rectangle produce scaled copies of each other.
    """
    if n < 0:
        raise ValueError(f"node count must be non-negative, got {n}")
    if not (width > 0 and height > 0) or not math.isfinite(width * height):
        raise ValueError(f"area dimensions must be positive, got {width} x {height}")
    rng = make_rng(seed)
    u = rng.random((n, 2))
    coords = u * np.array([width, height], dtype=np.float64)
    return Topology(coords, float(width), float(height))


def _open(path_or_stream, mode):
    if hasattr(path_or_stream, "read") or hasattr(path_or_stream, "write"):
        return _NoClose(path_or_stream)
    return open(path_or_stream, mode, encoding="utf-8", newline="")


class _NoClose:
    def __init__(self, f):
        self.f = f

    def __enter__(self):
        return self.f

    def __exit__(self, *exc):
        return False


def load_topology(source: PathOrStream) -> Topology:
    """Read a topology from CSV with header ``id,x,y`` (``id`` optional).

    Rows without an id column get ids from row order. When ids are present
    they must be a permutation of ``0..n-1``; rows are reordered by id.
    """
    with _open(source, "r") as f:
        text = f.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    try:
        header = next(reader)
    except StopIteration:
        raise TopologyParseError(1, "missing header") from None
    header = [h.strip() for h in header]
    if header == ["id", "x", "y"]:
        has_id = True
    elif header == ["x", "y"]:
        has_id = False
    else:
        raise TopologyParseError(1, f"expected header 'id,x,y', got {','.join(header)!r}")

    ids: list[int] = []
    xs: list[float] = []
    ys: list[float] = []
    seen: dict[int, int] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise TopologyParseError(line, f"expected {len(header)} fields, got {len(row)}")
        try:
            if has_id:
                node_id = int(row[0])
                x, y = float(row[1]), float(row[2])
            else:
                node_id = len(ids)
                x, y = float(row[0]), float(row[1])
        except ValueError as e:
            raise TopologyParseError(line, f"{e} in row {','.join(row)!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise TopologyParseError(line, "non-finite coordinate")
        if node_id < 0:
            raise TopologyParseError(line, f"negative id {node_id}")
        if node_id in seen:
            raise TopologyParseError(line, f"duplicate id {node_id} (first on line {seen[node_id]})")
        seen[node_id] = line
        ids.append(node_id)
        xs.append(x)
        ys.append(y)

    n = len(ids)
    if has_id and n:
        missing = sorted(set(range(n)) - set(ids))
        if missing:
            bad = next(i for i in ids if i >= n)
            raise TopologyParseError(seen[bad], f"id {bad} leaves a gap (missing id {missing[0]})")
    coords = np.empty((n, 2), dtype=np.float64)
    coords[ids, 0] = xs
    coords[ids, 1] = ys
    return Topology(coords)


def save_topology(topology: Topology, dest: PathOrStream) -> None:
    """Write ``topology`` as ``id,x,y`` CSV with LF line endings.

    Coordinates use the shortest repr that round-trips exactly.
    """
    lines = [",".join(CSV_HEADER)]
    for i, (x, y) in enumerate(topology.coords.tolist()):
        lines.append(f"{i},{x!r},{y!r}")
    data = "\n".join(lines) + "\n"
    try:
        with _open(dest, "w") as f:
            f.write(data)
    except OSError as e:
        raise OSError(e.errno, f"cannot write topology: {e.strerror}", str(dest)) from e
