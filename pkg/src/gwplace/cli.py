"""Command-line front end: generate, solve, validate, bench, plot.

Exit codes: 0 success, 1 usage error, 2 infeasible solution, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import bench, plot
from .graph import ProblemInstance, load_solution, save_edge_list, save_solution
from .radio import PropagationParams, build_visibility_graph, pair_sf, params_from_mapping, read_config
from .solver import create_connection_graph, validate_solution
from .topo import TopologyParseError, generate_topology, load_topology, save_topology

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _capacity(text: str) -> Fraction:
    try:
        c = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid capacity {text!r}") from None
    if c <= 0:
        raise argparse.ArgumentTypeError("capacity must be positive")
    return c


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _area(text: str) -> tuple[float, float]:
    w, sep, h = text.lower().partition("x")
    try:
        area = (float(w), float(h))
    except ValueError:
        area = None
    if not sep or area is None or not (area[0] > 0 and area[1] > 0):
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT in meters, got {text!r}")
    return area


def _add_radio_args(p, seed_help="shadowing seed (default 0)"):
    p.add_argument("--config", help="flat key = value file with propagation (and grid) settings")
    p.add_argument("--seed", type=int, default=0, help=seed_help)
    g = p.add_argument_group("propagation overrides")
    g.add_argument("--tx-power", dest="tx_power_dbm", type=float)
    g.add_argument("--pl0", dest="pl0_dbm", type=float)
    g.add_argument("--d0", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--sigma", dest="shadowing_sigma_db", type=float)
    g.add_argument("--sensitivity", dest="sensitivity_dbm", help="e.g. 7:-123,8:-126,...,12:-137")


def _add_instance_args(p):
    p.add_argument("--k", type=_positive_int, default=1, help="gateways required per station")
    p.add_argument("--capacity", "-c", type=_capacity, default=None,
                   help=f"per-gateway cost budget (default {bench.DEFAULT_CAPACITY})")


def _config(args) -> dict[str, str]:
    return read_config(args.config) if getattr(args, "config", None) else {}


def _params(args, cfg) -> PropagationParams:
    values = dict(cfg)
    for key in ("tx_power_dbm", "pl0_dbm", "d0", "gamma", "shadowing_sigma_db", "sensitivity_dbm"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v if isinstance(v, str) else repr(v)
    try:
        return params_from_mapping(values)
    except ValueError as e:
        raise UsageError(f"invalid propagation parameters: {e}") from None


def _instance_capacity(args, cfg) -> Fraction:
    if args.capacity is not None:
        return args.capacity
    try:
        return _capacity(cfg.get("capacity", str(bench.DEFAULT_CAPACITY)))
    except argparse.ArgumentTypeError as e:
        raise UsageError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gwplace", description="LP WAN gateway placement by greedy capacitated k-domination.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="random uniform topology to CSV")
    p.add_argument("--nodes", type=_non_negative_int, required=True)
    p.add_argument("--width", type=_positive_float, required=True)
    p.add_argument("--height", type=_positive_float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("solve", help="place gateways for a topology")
    p.add_argument("--topology", required=True)
    p.add_argument("--out", required=True, help="solution JSON path")
    p.add_argument("--graph-out", help="also write the visibility graph as edge-list CSV")
    _add_instance_args(p)
    _add_radio_args(p)

    p = sub.add_parser("validate", help="check a solution against its instance")
    p.add_argument("--topology", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    _add_instance_args(p)
    _add_radio_args(p)

    p = sub.add_parser("bench", help="run the experiment grid")
    p.add_argument("--preset", choices=["published"], help="the published grid: 5 node counts, 4 areas, k=1..3, 30 repetitions")
    p.add_argument("--nodes", type=_non_negative_int, nargs="+")
    p.add_argument("--areas", type=_area, nargs="+", metavar="WxH")
    p.add_argument("--k", type=_positive_int, nargs="+", dest="k_values")
    p.add_argument("--reps", type=_positive_int)
    p.add_argument("--capacity", "-c", type=_capacity, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json")
    _add_radio_args(p, "base seed; topology and shadowing seeds derive from it (default 0)")

    p = sub.add_parser("plot", help="SVG coverage map and SF histogram")
    p.add_argument("--topology", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--out", required=True, help="coverage map SVG path")
    p.add_argument("--hist-out", help="SF histogram SVG path")
    _add_radio_args(p)
    return parser


def cmd_generate(args) -> int:
    topo = generate_topology(args.nodes, args.width, args.height, args.seed)
    save_topology(topo, args.out)
    print(f"wrote {len(topo)} nodes to {args.out}")
    return EXIT_OK


def _load_instance(args):
    cfg = _config(args)
    params = _params(args, cfg)
    topo = load_topology(args.topology)
    graph = build_visibility_graph(topo, params, args.seed)
    return topo, graph, ProblemInstance(graph, _instance_capacity(args, cfg), args.k)


def cmd_solve(args) -> int:
    _, graph, instance = _load_instance(args)
    t0 = time.perf_counter()
    sol = create_connection_graph(instance)
    elapsed = time.perf_counter() - t0
    report = validate_solution(instance, sol)
    save_solution(sol, args.out)
    if args.graph_out:
        save_edge_list(graph, args.graph_out)
    sf = bench.avg_sf(sol, graph)
    print(f"gateways={len(sol.gateways)} time_s={elapsed:.3f} avg_sf={sf:.2f} iterations={sol.iterations}")
    if not report.feasible:
        sys.stderr.write(report.to_text())
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_validate(args) -> int:
    _, _, instance = _load_instance(args)
    sol = load_solution(args.solution)
    report = validate_solution(instance, sol)
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _grid(args) -> bench.ExperimentGrid:
    cfg = _config(args)
    kw = {}
    if args.preset == "published":
        kw = dict(
            node_counts=list(bench.PUBLISHED_NODE_COUNTS),
            areas=list(bench.PUBLISHED_AREAS),
            k_values=list(bench.PUBLISHED_K_VALUES),
            repetitions=bench.PUBLISHED_REPETITIONS,
        )
    try:
        if "node_counts" in cfg:
            kw["node_counts"] = [_non_negative_int(x) for x in cfg["node_counts"].split(",")]
        if "areas" in cfg:
            kw["areas"] = [_area(x.strip()) for x in cfg["areas"].split(",")]
        if "k_values" in cfg:
            kw["k_values"] = [_positive_int(x) for x in cfg["k_values"].split(",")]
        if "repetitions" in cfg:
            kw["repetitions"] = _positive_int(cfg["repetitions"])
    except (ValueError, argparse.ArgumentTypeError) as e:
        raise UsageError(f"invalid grid config: {e}") from None
    if args.nodes:
        kw["node_counts"] = args.nodes
    if args.areas:
        kw["areas"] = args.areas
    if args.k_values:
        kw["k_values"] = args.k_values
    if args.reps:
        kw["repetitions"] = args.reps
    if "node_counts" not in kw or "areas" not in kw:
        raise UsageError("bench needs --preset published or both --nodes and --areas (flags or config)")
    kw.setdefault("k_values", [1])
    kw.setdefault("repetitions", bench.PUBLISHED_REPETITIONS)
    try:
        return bench.ExperimentGrid(
            base_seed=args.seed,
            propagation=_params(args, cfg),
            capacity=_instance_capacity(args, cfg),
            **kw,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_bench(args) -> int:
    grid = _grid(args)
    result = bench.run_experiment(grid, workers=args.workers)
    with open(args.out_csv, "w", encoding="utf-8", newline="") as f:
        f.write(result.to_csv())
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8") as f:
            f.write(result.to_json())
    for s in result.summaries():
        print(f"n={s.n} area={s.width:g}x{s.height:g} k={s.k} runs={s.runs} "
              f"gateways={s.gateway_count:.2f} time_s={s.wall_time:.3f} avg_sf={s.avg_sf:.2f}")
    return EXIT_OK


def cmd_plot(args) -> int:
    cfg = _config(args)
    params = _params(args, cfg)
    topo = load_topology(args.topology)
    sol = load_solution(args.solution)
    try:
        plot.check_consistent(topo, sol)
    except ValueError as e:
        raise UsageError(f"topology and solution do not match: {e}") from None
    pairs = sorted(sol.connections)
    sfs = pair_sf(topo, params, args.seed, [s for s, _ in pairs], [g for _, g in pairs])
    link_sf = {p: int(s) for p, s in zip(pairs, sfs.tolist()) if s}
    svg_map = plot.coverage_map_svg(topo, sol, link_sf)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(svg_map)
    if args.hist_out:
        hist = bench.sf_fractions(link_sf, len(topo) - len(sol.gateways))
        with open(args.hist_out, "w", encoding="utf-8") as f:
            f.write(plot.sf_histogram_svg(hist, f"{len(topo)} nodes, {len(sol.gateways)} gateways"))
    print(f"wrote {args.out}" + (f" and {args.hist_out}" if args.hist_out else ""))
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "validate": cmd_validate,
    "bench": cmd_bench,
    "plot": cmd_plot,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        sys.stderr.write(f"gwplace {args.command}: error: {e}\n")
        return EXIT_USAGE
    except TopologyParseError as e:
        sys.stderr.write(f"gwplace {args.command}: error: {e}\n")
        return EXIT_USAGE
    except bench.InfeasibleRunError as e:
        sys.stderr.write(f"gwplace {args.command}: {e}\n")
        return EXIT_INFEASIBLE
    except OSError as e:
        sys.stderr.write(f"gwplace {args.command}: I/O error: {e}\n")
        return EXIT_IO
    except (ValueError, KeyError) as e:
        sys.stderr.write(f"gwplace {args.command}: error: invalid input: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
