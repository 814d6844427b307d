"""Visibility graph, placement solution and the coverage deficit metric."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .topo import PathOrStream, _open

# Link costs are k/32 for k in {1, 2, 4, 8, 16, 32}; storing the numerator
# keeps capacity arithmetic exact.
COST_DENOMINATOR = 32


def cost_units(sf) -> np.ndarray | int:
    """Numerator of the link cost over 32: SF7 -> 1, ..., SF12 -> 32."""
    if np.ndim(sf) == 0:
        return 1 << (int(sf) - 7)
    return np.left_shift(1, np.asarray(sf, dtype=np.int64) - 7)


def capacity_units(c) -> int:
    """Largest integer load (in 1/32 units) that still satisfies ``load <= c``."""
    c = Fraction(c)
    if c < 0:
        raise ValueError(f"capacity must be non-negative, got {c}")
    return math.floor(c * COST_DENOMINATOR)


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    """Immutable undirected graph in CSR form.

    ``indices[indptr[v]:indptr[v+1]]`` are the neighbors of ``v`` in
    ascending id order and ``sf`` holds the matching spreading factors.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    sf: np.ndarray

    @classmethod
    def from_edges(cls, n: int, u, v, sf) -> "VisibilityGraph":
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        sf = np.asarray(sf, dtype=np.int8).ravel()
        if not (u.shape == v.shape == sf.shape):
            raise ValueError("edge arrays must have equal length")
        if u.size:
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            if sf.min() < 7 or sf.max() > 12:
                raise ValueError("spreading factors must be in 7..12")
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        sfs = np.concatenate([sf, sf])
        order = np.lexsort((cols, rows))
        rows, cols, sfs = rows[order], cols[order], sfs[order]
        if rows.size > 1:
            dup = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise ValueError(f"parallel edge {{{rows[k]}, {cols[k]}}}")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(n, indptr, cols, sfs)

    @classmethod
    def from_edge_list(cls, n: int, edges: Iterable[tuple[int, int, int]]) -> "VisibilityGraph":
        edges = list(edges)
        if not edges:
            return cls.from_edges(n, [], [], [])
        u, v, s = zip(*edges)
        return cls.from_edges(n, u, v, s)

    @property
    def num_edges(self) -> int:
        return int(self.indices.size // 2)

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range for graph with {self.n} vertices")

    def neighbor_arrays(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        self._check(v)
        a, b = self.indptr[v], self.indptr[v + 1]
        return self.indices[a:b], self.sf[a:b]

    def neighbors(self, v: int) -> list[tuple[int, int, Fraction]]:
        """``(w, sf, cost)`` for each neighbor of ``v``, by ascending ``w``."""
        idx, sf = self.neighbor_arrays(v)
        return [
            (w, s, Fraction(1 << (s - 7), COST_DENOMINATOR))
            for w, s in zip(idx.tolist(), sf.tolist())
        ]

    def degree(self, v: int) -> int:
        self._check(v)
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edge_sf(self, a: int, b: int) -> int:
        """SF of edge ``{a, b}``; ``KeyError`` if absent."""
        idx, sf = self.neighbor_arrays(a)
        self._check(b)
        pos = int(np.searchsorted(idx, b))
        if pos < idx.size and idx[pos] == b:
            return int(sf[pos])
        raise KeyError((a, b))

    def has_edge(self, a: int, b: int) -> bool:
        try:
            self.edge_sf(a, b)
        except (KeyError, ValueError):
            return False
        return True

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Each edge once as ``(u, v, sf)`` with ``u < v``, in CSR order."""
        rows = np.repeat(np.arange(self.n), self.degrees())
        keep = rows < self.indices
        yield from zip(rows[keep].tolist(), self.indices[keep].tolist(), self.sf[keep].tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VisibilityGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.sf, other.sf)
        )


def save_edge_list(graph: VisibilityGraph, dest: PathOrStream) -> None:
    """Write ``u,v,sf,cost`` rows, one per undirected edge with ``u < v``.

    Costs are powers of two and print exactly in decimal.
    """
    lines = ["u,v,sf,cost"]
    for u, v, s in graph.edges():
        lines.append(f"{u},{v},{s},{(1 << (s - 7)) / COST_DENOMINATOR!r}")
    with _open(dest, "w") as f:
        f.write("\n".join(lines) + "\n")


def load_edge_list(source: PathOrStream, n: int) -> VisibilityGraph:
    with _open(source, "r") as f:
        text = f.read()
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != "u,v,sf,cost":
        raise ValueError("expected header 'u,v,sf,cost'")
    edges = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        u, v, s, cost = line.split(",")
        s = int(s)
        if Fraction(cost) != Fraction(1 << (s - 7), COST_DENOMINATOR):
            raise ValueError(f"line {lineno}: cost {cost} does not match SF{s}")
        edges.append((int(u), int(v), s))
    return VisibilityGraph.from_edge_list(n, edges)


@dataclass(frozen=True)
class ProblemInstance:
    """The triple (graph, capacity, k)."""

    graph: VisibilityGraph
    capacity: Fraction
    k: int = 1

    def __post_init__(self):
        c = Fraction(self.capacity)
        if not c > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        object.__setattr__(self, "capacity", c)
        object.__setattr__(self, "k", int(self.k))

    @property
    def n(self) -> int:
        return self.graph.n


@dataclass(frozen=True)
class PlacementSolution:
    """Gateways plus station-to-gateway connections.

    ``connections`` holds ``(station, gateway)`` pairs.
    """

    gateways: frozenset[int]
    connections: frozenset[tuple[int, int]]
    iterations: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gateways", frozenset(int(g) for g in self.gateways))
        object.__setattr__(
            self, "connections", frozenset((int(s), int(g)) for s, g in self.connections)
        )

    def serving(self) -> dict[int, list[int]]:
        """Gateways serving each station, sorted."""
        out: dict[int, list[int]] = {}
        for s, g in sorted(self.connections):
            out.setdefault(s, []).append(g)
        return out

    def to_dict(self) -> dict:
        return {
            "gateways": sorted(self.gateways),
            "connections": [list(p) for p in sorted(self.connections)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "PlacementSolution":
        conns = []
        for pair in data.get("connections", []):
            if len(pair) != 2:
                raise ValueError(f"connection must be [station, gateway], got {pair!r}")
            conns.append((int(pair[0]), int(pair[1])))
        return cls(frozenset(int(g) for g in data["gateways"]), frozenset(conns))

    @classmethod
    def from_json(cls, text: str) -> "PlacementSolution":
        return cls.from_dict(json.loads(text))


def save_solution(solution: PlacementSolution, dest: PathOrStream) -> None:
    with _open(dest, "w") as f:
        f.write(solution.to_json())


def load_solution(source: PathOrStream) -> PlacementSolution:
    with _open(source, "r") as f:
        return PlacementSolution.from_json(f.read())


def neighbors(graph: VisibilityGraph, v: int) -> list[tuple[int, int, Fraction]]:
    return graph.neighbors(v)


def coverage_deficit(graph: VisibilityGraph, gateways: Iterable[int], k: int) -> int:
    """``n*k`` minus the domination credit of ``gateways``.

    A gateway earns ``k``; any other vertex earns ``min(k, #gateway
    neighbors)``. Zero exactly when ``gateways`` is k-dominating.
    """
    in_d = np.zeros(graph.n, dtype=bool)
    d = list(gateways)
    if d:
        in_d[np.asarray(d, dtype=np.int64)] = True
    rows = np.repeat(np.arange(graph.n), graph.degrees())
    hits = np.bincount(rows, weights=in_d[graph.indices], minlength=graph.n).astype(np.int64)
    credit = np.where(in_d, k, np.minimum(hits, k))
    return int(graph.n * k - credit.sum())
