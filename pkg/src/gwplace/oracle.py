"""Exact minimum gateway count for tiny instances (test oracle)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .graph import COST_DENOMINATOR, PlacementSolution, ProblemInstance, capacity_units

MAX_NODES = 12


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimal_size: int
    witness: PlacementSolution


def _assign(instance: ProblemInstance, gateways: tuple[int, ...]) -> list[tuple[int, int]] | None:
    """Find station -> k-gateway assignments within capacity, or ``None``.

    Each station takes exactly ``k`` gateways; taking more only adds load.
    Backtracks over stations (most constrained first) with memo on the
    remaining budgets.
    """
    g, k = instance.graph, instance.k
    budget = min(capacity_units(instance.capacity), COST_DENOMINATOR * g.n)
    gw_index = {w: i for i, w in enumerate(gateways)}
    stations = []
    for v in range(g.n):
        if v in gw_index:
            continue
        opts = [(gw_index[w], 1 << (s - 7)) for w, s, _ in g.neighbors(v) if w in gw_index]
        if len(opts) < k:
            return None
        stations.append((v, [c for c in combinations(opts, k)]))
    stations.sort(key=lambda item: (len(item[1]), item[0]))

    @lru_cache(maxsize=None)
    def search(pos: int, remaining: tuple[int, ...]):
        if pos == len(stations):
            return ()
        for combo in stations[pos][1]:
            rem = list(remaining)
            ok = True
            for gi, units in combo:
                rem[gi] -= units
                if rem[gi] < 0:
                    ok = False
                    break
            if not ok:
                continue
            rest = search(pos + 1, tuple(rem))
            if rest is not None:
                return (tuple(gi for gi, _ in combo),) + rest
        return None

    picks = search(0, (budget,) * len(gateways))
    search.cache_clear()
    if picks is None:
        return None
    return [
        (v, gateways[gi]) for (v, _), combo in zip(stations, picks) for gi in combo
    ]


def exact_min_gateways(instance: ProblemInstance) -> OracleResult:
    """Smallest feasible gateway set, by exhaustive search.

    Candidate sets are tried by size, then in lexicographic order, so the
    witness is deterministic. Limited to ``MAX_NODES`` vertices.
    """
    n = instance.n
    if n > MAX_NODES:
        raise OracleSizeError(f"exact search supports at most {MAX_NODES} nodes, got {n}")
    for size in range(n + 1):
        for d in combinations(range(n), size):
            conns = _assign(instance, d)
            if conns is not None:
                return OracleResult(size, PlacementSolution(frozenset(d), frozenset(conns)))
    raise AssertionError("the all-gateway set is always feasible")
