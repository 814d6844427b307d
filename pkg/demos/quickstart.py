"""
Placing gateways on a random city
=================================

Scatter nodes over an area, work out which pairs can hear each other,
then pick gateways so every station reaches k of them without any
gateway going over its airtime budget.
"""

import numpy as np

from gwplace import (ProblemInstance, build_visibility_graph, create_connection_graph,
                     generate_topology, validate_solution)
from gwplace.bench import avg_sf, sf_distribution

# 1000 nodes over a 5 km x 7.5 km area
topo = generate_topology(1000, 5000, 7500, seed=1)
print(topo.coords[:3])

# links come from log-distance path loss with per-pair shadowing
graph = build_visibility_graph(topo, seed=1)
print("links:", graph.num_edges, "mean degree:", np.mean(graph.degrees()))

# each station needs two gateways; each gateway carries a load of at most 40
inst = ProblemInstance(graph, capacity=40, k=2)
sol = create_connection_graph(inst)
print("gateways:", len(sol.gateways), "rounds:", sol.iterations)

report = validate_solution(inst, sol)
print(report.to_text())

print("average SF over connections: %.2f" % avg_sf(sol, graph))
for sf, frac in sf_distribution(sol, graph).items():
    print(f"  SF{sf}: {frac:6.1%}")
