"""
Drawing a coverage map
======================

Writes two SVG files: the node map with gateway links coloured by
spreading factor, and the histogram of each station's best SF.
"""

import sys

from gwplace import ProblemInstance, build_visibility_graph, create_connection_graph, generate_topology
from gwplace.bench import sf_distribution
from gwplace.plot import coverage_map_svg, sf_histogram_svg

out = sys.argv[1] if len(sys.argv) > 1 else "coverage"

topo = generate_topology(500, 5000, 7500, seed=11)
graph = build_visibility_graph(topo, seed=11)
sol = create_connection_graph(ProblemInstance(graph, 40, 1))

link_sf = {(s, g): graph.edge_sf(s, g) for s, g in sol.connections}
with open(out + "_map.svg", "w") as f:
    f.write(coverage_map_svg(topo, sol, link_sf))
with open(out + "_sf.svg", "w") as f:
    f.write(sf_histogram_svg(sf_distribution(sol, graph), "best SF per station"))
print("wrote", out + "_map.svg", "and", out + "_sf.svg")
