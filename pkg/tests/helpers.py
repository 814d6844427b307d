"""Small graph builders and hypothesis strategies shared by the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from hypothesis import strategies as st

from gwplace.graph import ProblemInstance, VisibilityGraph


def complete_graph(n, sf=7):
    return VisibilityGraph.from_edge_list(n, [(a, b, sf) for a, b in itertools.combinations(range(n), 2)])


def star_graph(leaves, sf=7):
    """Center 0 with leaves 1..leaves."""
    return VisibilityGraph.from_edge_list(leaves + 1, [(0, i, sf) for i in range(1, leaves + 1)])


def path_graph(n, sf=7):
    return VisibilityGraph.from_edge_list(n, [(i, i + 1, sf) for i in range(n - 1)])


def edgeless_graph(n):
    return VisibilityGraph.from_edge_list(n, [])


def random_graph(rng: random.Random, n: int, p: float) -> VisibilityGraph:
    edges = [
        (a, b, rng.randint(7, 12))
        for a, b in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    return VisibilityGraph.from_edge_list(n, edges)


CAPACITIES = [Fraction(1, 32), Fraction(2, 32), Fraction(3, 32), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(40)]


@st.composite
def instances(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    sfs = draw(st.lists(st.integers(7, 12), min_size=len(pairs), max_size=len(pairs)))
    edges = [(a, b, s) for (a, b), keep, s in zip(pairs, chosen, sfs) if keep]
    k = draw(st.integers(1, 3))
    c = draw(st.sampled_from(CAPACITIES))
    return ProblemInstance(VisibilityGraph.from_edge_list(n, edges), c, k)
