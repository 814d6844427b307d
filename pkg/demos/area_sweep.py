"""
Gateway counts as the area grows
================================

A reduced version of the benchmark grid: 1000 nodes, four area sizes,
k from 1 to 3.  Pass ``--reps 30`` for the full repetition count.
"""

import argparse

from gwplace.bench import ExperimentGrid, run_experiment

parser = argparse.ArgumentParser()
parser.add_argument("--reps", type=int, default=5)
parser.add_argument("--workers", type=int, default=2)
args = parser.parse_args()

grid = ExperimentGrid.published(node_counts=[1000], repetitions=args.reps)
result = run_experiment(grid, workers=args.workers)

print(f"{'area':>13} {'k':>2} {'gateways':>9} {'avg SF':>7} {'time s':>7}")
for s in result.summaries():
    print(f"{s.width:6.0f}x{s.height:<6.0f} {s.k:2d} {s.gateway_count:9.2f} {s.avg_sf:7.2f} {s.wall_time:7.3f}")
