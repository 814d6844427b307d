"""Experiment grid over random uniform topologies, with per-run statistics."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import PlacementSolution, ProblemInstance, VisibilityGraph
from .radio import SPREADING_FACTORS, PropagationParams, build_visibility_graph
from .solver import create_connection_graph, validate_solution
from .topo import generate_topology

PUBLISHED_NODE_COUNTS = (1000, 2500, 5000, 10000, 20000)
PUBLISHED_AREAS = ((5000.0, 7500.0), (10000.0, 15000.0), (15000.0, 22500.0), (20000.0, 30000.0))
PUBLISHED_K_VALUES = (1, 2, 3)
PUBLISHED_REPETITIONS = 30
DEFAULT_CAPACITY = 40

CSV_COLUMNS = ["n", "width", "height", "k", "rep", "gateways", "time_s", "avg_sf"] + [
    f"sf{s}" for s in SPREADING_FACTORS
]


class InfeasibleRunError(RuntimeError):
    pass


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit seed from ``base_seed`` and any key parts."""
    text = "|".join(str(p) for p in (int(base_seed), *parts))
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


def avg_sf(solution: PlacementSolution, graph: VisibilityGraph) -> float:
    """Mean SF over all connections (a station with k links counts k times).

    NaN when there are no connections.
    """
    sfs = [graph.edge_sf(s, g) for s, g in solution.connections]
    return float(np.mean(sfs)) if sfs else math.nan


def sf_distribution(solution: PlacementSolution, graph: VisibilityGraph) -> dict[int, float]:
    """Fraction of non-gateway nodes whose best serving link has each SF.

    Only SFs that occur are keys. Returns ``{}`` with a warning when every
    node is a gateway.
    """
    link_sf = {(s, g): graph.edge_sf(s, g) for s, g in solution.connections}
    stations = graph.n - len(solution.gateways)
    if stations == 0:
        warnings.warn("all nodes are gateways; SF histogram is empty", stacklevel=2)
        return {}
    return sf_fractions(link_sf, stations)


def sf_fractions(link_sf: dict[tuple[int, int], int], stations: int) -> dict[int, float]:
    """Histogram of each station's minimum link SF, as fractions of ``stations``."""
    best: dict[int, int] = {}
    for (s, _), sf in link_sf.items():
        if sf < best.get(s, 99):
            best[s] = sf
    if stations <= 0:
        return {}
    counts = np.bincount(np.fromiter(best.values(), dtype=np.int64, count=len(best)), minlength=13)
    return {sf: int(counts[sf]) / stations for sf in SPREADING_FACTORS if counts[sf]}


@dataclass
class RunStats:
    n: int
    width: float
    height: float
    k: int
    rep: int
    seed: int
    gateway_count: int
    wall_time: float
    avg_sf: float
    sf_histogram: dict[int, float]
    iterations: int

    def csv_row(self) -> list:
        return [
            self.n, f"{self.width:g}", f"{self.height:g}", self.k, self.rep,
            self.gateway_count, f"{self.wall_time:.6f}", _fmt(self.avg_sf),
        ] + [_fmt(self.sf_histogram.get(s, 0.0)) for s in SPREADING_FACTORS]


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


@dataclass
class ExperimentGrid:
    node_counts: list[int] = field(default_factory=lambda: [1000])
    areas: list[tuple[float, float]] = field(default_factory=lambda: [PUBLISHED_AREAS[0]])
    k_values: list[int] = field(default_factory=lambda: [1])
    repetitions: int = PUBLISHED_REPETITIONS
    base_seed: int = 0
    propagation: PropagationParams = field(default_factory=PropagationParams)
    capacity: Fraction = Fraction(DEFAULT_CAPACITY)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if not self.node_counts or not self.areas or not self.k_values:
            raise ValueError("grid needs at least one node count, area and k")
        if any(n < 0 for n in self.node_counts):
            raise ValueError("node counts must be non-negative")
        if any(not (w > 0 and h > 0) for w, h in self.areas):
            raise ValueError("area dimensions must be positive")
        if any(int(k) != k or k < 1 for k in self.k_values):
            raise ValueError("k values must be positive integers")
        self.capacity = Fraction(self.capacity)
        if not self.capacity > 0:
            raise ValueError("capacity must be positive")

    @classmethod
    def published(cls, **overrides) -> "ExperimentGrid":
        kw = dict(
            node_counts=list(PUBLISHED_NODE_COUNTS),
            areas=list(PUBLISHED_AREAS),
            k_values=list(PUBLISHED_K_VALUES),
            repetitions=PUBLISHED_REPETITIONS,
        )
        kw.update(overrides)
        return cls(**kw)

    def cells(self) -> list[tuple[int, float, float, int]]:
        return [
            (n, float(w), float(h), int(k))
            for n in self.node_counts
            for w, h in self.areas
            for k in self.k_values
        ]


def topology_seed(base_seed: int, n: int, rep: int) -> int:
    # Area and k are left out on purpose: every cell of one repetition sees
    # the same unit-square draw (scaled) and the same shadowing, so trends
    # across area and k compare matched samples.
    return derive_seed(base_seed, "topology", n, rep)


def shadowing_seed(base_seed: int, n: int, rep: int) -> int:
    return derive_seed(base_seed, "shadowing", n, rep)


def _run_unit(args) -> list[RunStats]:
    n, w, h, ks, rep, base_seed, params, capacity = args
    seed = topology_seed(base_seed, n, rep)
    topo = generate_topology(n, w, h, seed)
    graph = build_visibility_graph(topo, params, shadowing_seed(base_seed, n, rep))
    out = []
    for k in ks:
        instance = ProblemInstance(graph, capacity, k)
        t0 = time.perf_counter()
        sol = create_connection_graph(instance)
        elapsed = time.perf_counter() - t0
        report = validate_solution(instance, sol)
        if not report.feasible:
            raise InfeasibleRunError(
                f"infeasible solution for n={n} area={w:g}x{h:g} k={k} rep={rep} "
                f"seed={seed}:\n{report.to_text()}"
            )
        hist = sf_distribution(sol, graph) if len(sol.gateways) < n else {}
        out.append(
            RunStats(n, w, h, k, rep, seed, len(sol.gateways), elapsed,
                     avg_sf(sol, graph), hist, sol.iterations)
        )
    return out


@dataclass
class CellSummary:
    n: int
    width: float
    height: float
    k: int
    runs: int
    gateway_count: float
    wall_time: float
    avg_sf: float
    sf_histogram: dict[int, float]

    def to_dict(self) -> dict:
        return {
            "n": self.n, "width": self.width, "height": self.height, "k": self.k,
            "runs": self.runs, "gateways": self.gateway_count, "time_s": self.wall_time,
            "avg_sf": None if math.isnan(self.avg_sf) else self.avg_sf,
            "sf_histogram": {f"sf{s}": v for s, v in self.sf_histogram.items()},
        }


@dataclass
class ExperimentResult:
    grid: ExperimentGrid
    runs: list[RunStats]

    def cell_runs(self, n, width, height, k) -> list[RunStats]:
        return [r for r in self.runs if (r.n, r.width, r.height, r.k) == (n, float(width), float(height), k)]

    def summaries(self) -> list[CellSummary]:
        out = []
        for n, w, h, k in self.grid.cells():
            rs = self.cell_runs(n, w, h, k)
            sfs = [r.avg_sf for r in rs if not math.isnan(r.avg_sf)]
            hists = [r.sf_histogram for r in rs if r.sf_histogram]
            hist = {
                s: float(np.mean([hh.get(s, 0.0) for hh in hists])) for s in SPREADING_FACTORS
            } if hists else {}
            out.append(CellSummary(
                n, w, h, k, len(rs),
                float(np.mean([r.gateway_count for r in rs])),
                float(np.mean([r.wall_time for r in rs])),
                float(np.mean(sfs)) if sfs else math.nan,
                hist,
            ))
        return out

    def summary(self, n, width, height, k) -> CellSummary:
        for s in self.summaries():
            if (s.n, s.width, s.height, s.k) == (n, float(width), float(height), k):
                return s
        raise KeyError((n, width, height, k))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.runs:
            writer.writerow(r.csv_row())
        return buf.getvalue()

    def to_json(self) -> str:
        g = self.grid
        doc = {
            "base_seed": g.base_seed,
            "capacity": str(g.capacity),
            "repetitions": g.repetitions,
            "cells": [s.to_dict() for s in self.summaries()],
        }
        return json.dumps(doc, indent=2) + "\n"


def run_experiment(grid: ExperimentGrid, workers: int = 1) -> ExperimentResult:
    """Run every (n, area, k) cell ``grid.repetitions`` times.

    Each repetition builds one topology and graph per (n, area) and solves it
    for every k. Runs are returned sorted by (n, width, height, k, rep)
    whatever the completion order.
    """
    units = [
        (n, float(w), float(h), list(grid.k_values), rep, grid.base_seed, grid.propagation, grid.capacity)
        for n in grid.node_counts
        for w, h in grid.areas
        for rep in range(grid.repetitions)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = [_run_unit(u) for u in units]
    runs = [r for chunk in chunks for r in chunk]
    order = {cell: i for i, cell in enumerate(grid.cells())}
    runs.sort(key=lambda r: (order[(r.n, r.width, r.height, r.k)], r.rep))
    return ExperimentResult(grid, runs)
