"""
How far is the greedy from optimal?
===================================

On graphs small enough to enumerate, compare the greedy gateway count
with the exact minimum.
"""

import random
from collections import Counter
from fractions import Fraction

from gwplace import ProblemInstance, VisibilityGraph, create_connection_graph, exact_min_gateways

rng = random.Random(3)
gaps = Counter()
for _ in range(200):
    n = rng.randint(4, 10)
    edges = [(a, b, rng.randint(7, 12)) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4]
    g = VisibilityGraph.from_edge_list(n, edges)
    inst = ProblemInstance(g, Fraction(rng.choice([2, 8, 32]), 32), rng.randint(1, 2))
    gaps[len(create_connection_graph(inst).gateways) - exact_min_gateways(inst).optimal_size] += 1

# extra gateways the greedy spent, over 200 instances
for extra in sorted(gaps):
    print(f"+{extra}: {gaps[extra]}")
