"""Greedy capacitated k-domination with an explicit connection scheme.

Each round scores every non-gateway ``w`` by ``1 + |S|`` where ``S`` is the
set of still-unserved neighbors ``w`` could take on: cheapest links first,
each admitted only while the gateway's load stays within capacity. The best
candidate becomes a gateway and is connected to its ``S``. Rounds repeat
until every vertex is a gateway or has ``k`` serving gateways.

Costs are kept as integer multiples of 1/32, so all capacity comparisons are
exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .graph import (
    COST_DENOMINATOR,
    PlacementSolution,
    ProblemInstance,
    VisibilityGraph,
    capacity_units,
)

N_LEVELS = 6  # SF7..SF12


@dataclass(frozen=True)
class GatewayChoice:
    w: int
    served: tuple[int, ...]
    value: int


class _GreedyState:
    """Mutable bookkeeping for one greedy run.

    ``counts[w, L]`` is the number of neighbors of ``w`` at cost level ``L``
    (SF ``7 + L``) that are still eligible, i.e. neither gateways nor served
    by ``k`` gateways. Scoring a candidate then only needs these six numbers.
    """

    def __init__(self, graph: VisibilityGraph, k: int, capacity):
        self.graph = graph
        self.k = k
        n = graph.n
        # Loads never exceed 32 * (n - 1), so clamping keeps int64 safe.
        self.budget = min(capacity_units(capacity), COST_DENOMINATOR * max(n, 1))
        self.in_d = np.zeros(n, dtype=bool)
        self.served = np.zeros(n, dtype=np.int64)
        self.eligible = np.ones(n, dtype=bool)
        self.serving: dict[int, list[int]] = {}
        self.connections: set[tuple[int, int]] = set()
        self.levels = graph.sf.astype(np.int64) - 7
        rows = np.repeat(np.arange(n, dtype=np.int64), graph.degrees())
        self.counts = np.bincount(
            rows * N_LEVELS + self.levels, minlength=n * N_LEVELS
        ).reshape(n, N_LEVELS)

    @classmethod
    def from_partial(cls, graph, k, capacity, gateways, connections) -> "_GreedyState":
        st = cls(graph, k, capacity)
        for g in sorted(set(gateways)):
            st._promote(int(g))
        for s, g in sorted(set(connections)):
            if st.in_d[s] and not st.in_d[g]:
                s, g = g, s
            if st.in_d[s]:
                continue
            st._connect(int(s), int(g))
        return st

    def _retire(self, v: int) -> None:
        if not self.eligible[v]:
            return
        self.eligible[v] = False
        a, b = self.graph.indptr[v], self.graph.indptr[v + 1]
        # neighbor ids are unique, so fancy-index decrement is safe
        self.counts[self.graph.indices[a:b], self.levels[a:b]] -= 1

    def _promote(self, w: int) -> None:
        self._retire(w)
        self.in_d[w] = True
        # A gateway serves itself; any connections it held as a station go.
        for g in self.serving.pop(w, []):
            self.connections.discard((w, g))
        self.served[w] = 0

    def _connect(self, s: int, g: int) -> None:
        if (s, g) in self.connections:
            return
        self.connections.add((s, g))
        self.serving.setdefault(s, []).append(g)
        self.served[s] += 1
        if self.served[s] >= self.k:
            self._retire(s)

    def scores(self) -> np.ndarray:
        """``1 + |S|`` for every non-gateway, 0 for gateways."""
        n = self.graph.n
        remaining = np.full(n, self.budget, dtype=np.int64)
        total = np.zeros(n, dtype=np.int64)
        alive = np.ones(n, dtype=bool)
        for level in range(N_LEVELS):
            unit = 1 << level
            avail = self.counts[:, level]
            take = np.minimum(avail, remaining // unit)
            take[~alive] = 0
            total += take
            remaining -= take * unit
            # the cheapest leftover no longer fits, so costlier ones won't either
            alive &= take == avail
        return np.where(self.in_d, 0, 1 + total)

    def served_set(self, w: int) -> tuple[int, ...]:
        nbrs, sfs = self.graph.neighbor_arrays(w)
        ok = self.eligible[nbrs]
        nbrs, sfs = nbrs[ok], sfs[ok]
        order = np.argsort(sfs, kind="stable")  # cost, then id
        units = np.left_shift(1, sfs[order].astype(np.int64) - 7)
        fits = np.cumsum(units) <= self.budget
        m = int(np.argmin(fits)) if not fits.all() else fits.size
        return tuple(nbrs[order][:m].tolist())

    def choose(self) -> GatewayChoice:
        value = self.scores()
        # ties: larger value, then a still-unserved vertex, then lowest id
        key = value * 2 + self.eligible
        w = int(np.argmax(key))
        served = self.served_set(w)
        assert len(served) + 1 == value[w]
        return GatewayChoice(w, served, int(value[w]))

    def apply(self, choice: GatewayChoice) -> None:
        self._promote(choice.w)
        for v in choice.served:
            self._connect(v, choice.w)

    def unmet_demand(self) -> int:
        """Missing connections over non-gateways; strictly drops every round."""
        return int(np.maximum(self.k - self.served[~self.in_d], 0).sum())

    def solution(self, iterations: int | None = None) -> PlacementSolution:
        return PlacementSolution(
            frozenset(np.flatnonzero(self.in_d).tolist()),
            frozenset(self.connections),
            iterations,
        )


def new_gateway(
    graph: VisibilityGraph,
    connections: Iterable[tuple[int, int]],
    gateways: Iterable[int],
    k: int,
    capacity,
) -> GatewayChoice:
    """Pick the next gateway given the current gateways and connections.

    ``connections`` are ``(station, gateway)`` pairs. Returns the winning
    vertex, the stations it would serve and its score ``1 + |S|``.
    """
    if graph.n == 0:
        raise ValueError("graph has no vertices")
    state = _GreedyState.from_partial(graph, k, capacity, gateways, connections)
    if state.in_d.all():
        raise ValueError("every vertex is already a gateway")
    return state.choose()


def create_connection_graph(
    instance: ProblemInstance,
    on_step: Callable[[GatewayChoice], None] | None = None,
) -> PlacementSolution:
    """Run the greedy until every vertex is a gateway or has ``k`` gateways.

    ``on_step`` is called with each choice, in order.
    """
    state = _GreedyState(instance.graph, instance.k, instance.capacity)
    iterations = 0
    while state.eligible.any():
        choice = state.choose()
        state.apply(choice)
        iterations += 1
        if on_step is not None:
            on_step(choice)
    assert iterations <= instance.n
    return state.solution(iterations)


def solve(graph: VisibilityGraph, capacity, k: int = 1) -> PlacementSolution:
    return create_connection_graph(ProblemInstance(graph, Fraction(capacity), k))


# --- validation ------------------------------------------------------------

EDGE_ENDPOINT = "edge-endpoint"
UNDER_DOMINATED = "under-dominated"
CAPACITY_EXCEEDED = "capacity-exceeded"
NOT_SUBGRAPH = "not-subgraph"


@dataclass(frozen=True)
class Violation:
    kind: str
    where: int | tuple[int, int]
    detail: str

    def to_dict(self) -> dict:
        where = list(self.where) if isinstance(self.where, tuple) else self.where
        return {"kind": self.kind, "where": where, "detail": self.detail}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "violations": [v.to_dict() for v in self.violations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        if self.feasible:
            return "feasible: all connection, domination and capacity conditions hold\n"
        lines = [f"infeasible: {len(self.violations)} violation(s)"]
        lines += [f"  {v.kind} at {v.where}: {v.detail}" for v in self.violations]
        return "\n".join(lines) + "\n"


def validate_solution(instance: ProblemInstance, solution: PlacementSolution) -> ValidationReport:
    """Check a placement against the three conditions of the problem.

    1. each connection joins a gateway and a non-gateway and is a graph edge;
    2. each non-gateway has at least ``k`` distinct serving gateways;
    3. each gateway's total link cost is at most the capacity (exact).
    """
    g, k = instance.graph, instance.k
    report = ValidationReport()
    bad = report.violations
    gateways = solution.gateways
    for w in sorted(gateways):
        if not 0 <= w < g.n:
            bad.append(Violation(NOT_SUBGRAPH, w, f"gateway {w} is not a vertex"))

    pairs = sorted({(min(a, b), max(a, b)) for a, b in solution.connections})
    load: dict[int, int] = {}
    partners: dict[int, set[int]] = {}
    for a, b in pairs:
        if a == b or not g.has_edge(a, b):
            bad.append(Violation(NOT_SUBGRAPH, (a, b), "connection is not an edge of the graph"))
            continue
        if (a in gateways) == (b in gateways):
            what = "two gateways" if a in gateways else "two stations"
            bad.append(Violation(EDGE_ENDPOINT, (a, b), f"connection joins {what}"))
            continue
        station, gw = (a, b) if b in gateways else (b, a)
        load[gw] = load.get(gw, 0) + (1 << (g.edge_sf(a, b) - 7))
        partners.setdefault(station, set()).add(gw)

    for v in range(g.n):
        if v in gateways:
            continue
        have = len(partners.get(v, ()))
        if have < k:
            bad.append(Violation(UNDER_DOMINATED, v, f"served by {have} gateway(s), needs {k}"))

    c = instance.capacity
    for gw in sorted(load):
        used = Fraction(load[gw], COST_DENOMINATOR)
        if used > c:
            bad.append(Violation(CAPACITY_EXCEEDED, gw, f"load {used} exceeds capacity {c}"))
    return report
