from fractions import Fraction

import pytest
from hypothesis import given, settings

from gwplace.graph import PlacementSolution, ProblemInstance, coverage_deficit
from gwplace.solver import (
    CAPACITY_EXCEEDED,
    EDGE_ENDPOINT,
    NOT_SUBGRAPH,
    UNDER_DOMINATED,
    _GreedyState,
    create_connection_graph,
    new_gateway,
    validate_solution,
)
from gwplace.topo import generate_topology
from gwplace.radio import build_visibility_graph
from helpers import complete_graph, edgeless_graph, instances, path_graph, random_graph, star_graph
from reference import adjacency, reference_choice, reference_greedy


def test_new_gateway_isolated_vertex():
    choice = new_gateway(edgeless_graph(1), [], [], 1, 1)
    assert (choice.w, choice.served, choice.value) == (0, (), 1)


def test_new_gateway_star_unbounded():
    g = star_graph(4)
    choice = new_gateway(g, [], [], 1, 1)
    assert (choice.w, choice.served, choice.value) == (0, (1, 2, 3, 4), 5)


def test_new_gateway_star_enumerated_values():
    g = star_graph(4)
    st = _GreedyState(g, 1, 1)
    assert st.scores().tolist() == [5, 2, 2, 2, 2]


def test_new_gateway_star_tight_capacity():
    choice = new_gateway(star_graph(4), [], [], 1, Fraction(2, 32))
    assert (choice.w, choice.served, choice.value) == (0, (1, 2), 3)


def test_new_gateway_prefers_cheap_links():
    # center 0; leaf 1 at SF12, leaves 2, 3 at SF7; budget fits 1 + 1/32 + 1/32 only partially
    from gwplace.graph import VisibilityGraph
    g = VisibilityGraph.from_edge_list(4, [(0, 1, 12), (0, 2, 7), (0, 3, 7)])
    choice = new_gateway(g, [], [], 1, Fraction(1))
    assert choice.w == 0
    assert choice.served == (2, 3)


def test_new_gateway_errors():
    with pytest.raises(ValueError):
        new_gateway(edgeless_graph(0), [], [], 1, 1)
    with pytest.raises(ValueError):
        new_gateway(edgeless_graph(2), [], [0, 1], 1, 1)


def test_gateways_score_zero():
    st = _GreedyState.from_partial(complete_graph(4), 1, 1, [2], [])
    assert st.scores()[2] == 0


def test_edgeless_all_gateways():
    sol = create_connection_graph(ProblemInstance(edgeless_graph(4), 1, 1))
    assert sol.gateways == {0, 1, 2, 3}
    assert sol.connections == frozenset()
    assert sol.iterations == 4


def test_k5_single_gateway():
    sol = create_connection_graph(ProblemInstance(complete_graph(5), 1, 1))
    assert len(sol.gateways) == 1
    assert len(sol.connections) == 4


def test_path_picks_middle():
    sol = create_connection_graph(ProblemInstance(path_graph(3), 1, 1))
    assert sol.gateways == {1}
    assert sol.connections == {(0, 1), (2, 1)}


def test_capacity_forces_extra_gateways():
    # 33 SF7 leaves exceed budget 1 by one link
    sol = create_connection_graph(ProblemInstance(star_graph(33), 1, 1))
    assert len(sol.gateways) == 2
    assert validate_solution(ProblemInstance(star_graph(33), 1, 1), sol).feasible


@settings(max_examples=300, deadline=None)
@given(instances())
def test_choice_matches_literal_reference(inst):
    adj = adjacency(inst.graph)
    st = _GreedyState(inst.graph, inst.k, inst.capacity)
    conns: set = set()
    gateways: set = set()
    while st.eligible.any():
        choice = st.choose()
        w, served, value = reference_choice(adj, conns, gateways, inst.k, inst.capacity)
        assert (choice.w, sorted(choice.served), choice.value) == (w, served, value)
        fresh = new_gateway(inst.graph, conns, gateways, inst.k, inst.capacity)
        assert fresh == choice
        st.apply(choice)
        gateways.add(w)
        conns = {(s, g) for s, g in conns if s != w} | {(v, w) for v in served}


@settings(max_examples=300, deadline=None)
@given(instances())
def test_greedy_matches_reference_and_is_feasible(inst):
    sol = create_connection_graph(inst)
    d, conns, rounds = reference_greedy(inst.graph, inst.k, inst.capacity)
    assert sol.gateways == d
    assert sol.connections == conns
    assert sol.iterations == rounds <= inst.n
    report = validate_solution(inst, sol)
    assert report.feasible, report.to_text()
    assert coverage_deficit(inst.graph, sol.gateways, inst.k) == 0
    for k2 in range(1, inst.k + 1):
        assert coverage_deficit(inst.graph, sol.gateways, k2) == 0


@settings(max_examples=200, deadline=None)
@given(instances())
def test_unmet_demand_strictly_drops(inst):
    st = _GreedyState(inst.graph, inst.k, inst.capacity)
    last = st.unmet_demand()
    while st.eligible.any():
        st.apply(st.choose())
        now = st.unmet_demand()
        assert now < last
        last = now
    assert last == 0


def test_capacity_never_overshoots(rng):
    for _ in range(30):
        g = random_graph(rng, 40, 0.4)
        c = rng.choice([Fraction(1, 8), Fraction(1, 2), Fraction(1), Fraction(5, 3)])
        inst = ProblemInstance(g, c, rng.randint(1, 3))
        sol = create_connection_graph(inst)
        load = {}
        for s, w in sol.connections:
            load[w] = load.get(w, 0) + Fraction(1, 2 ** (12 - g.edge_sf(s, w)))
        assert all(v <= c for v in load.values())


def test_validate_self_consistency_sweep():
    for seed in range(50):
        topo = generate_topology(60 + seed, 3000, 4500, seed)
        g = build_visibility_graph(topo, None, seed)
        inst = ProblemInstance(g, Fraction(seed % 7 + 1, 4), seed % 3 + 1)
        assert validate_solution(inst, create_connection_graph(inst)).feasible


def test_deterministic_json(rng):
    g = random_graph(rng, 60, 0.2)
    inst = ProblemInstance(g, 1, 2)
    assert create_connection_graph(inst).to_json() == create_connection_graph(inst).to_json()


# --- validator ---------------------------------------------------------------

def test_validator_edge_between_gateways():
    inst = ProblemInstance(complete_graph(3), 1, 1)
    sol = PlacementSolution({0, 1}, {(2, 0), (1, 0)})
    report = validate_solution(inst, sol)
    assert not report.feasible
    assert report.kinds() == {EDGE_ENDPOINT}


def test_validator_capacity_33_stations():
    inst = ProblemInstance(star_graph(33), 1, 1)
    sol = PlacementSolution({0}, {(i, 0) for i in range(1, 34)})
    report = validate_solution(inst, sol)
    assert report.kinds() == {CAPACITY_EXCEEDED}
    assert "33/32" in report.violations[0].detail


def test_validator_exact_budget_is_fine():
    inst = ProblemInstance(star_graph(32), 1, 1)
    sol = PlacementSolution({0}, {(i, 0) for i in range(1, 33)})
    assert validate_solution(inst, sol).feasible


def test_validator_under_dominated_and_not_subgraph():
    inst = ProblemInstance(path_graph(4), 1, 2)
    sol = PlacementSolution({1}, {(0, 1), (2, 1), (3, 1)})
    report = validate_solution(inst, sol)
    kinds = [v.kind for v in report.violations]
    assert NOT_SUBGRAPH in kinds  # 1-3 is not an edge
    assert kinds.count(UNDER_DOMINATED) == 3  # k=2 everywhere
    assert not report.feasible
    assert '"feasible": false' in report.to_json()
    assert "under-dominated" in report.to_text()


def test_validator_accepts_reversed_pairs():
    inst = ProblemInstance(path_graph(3), 1, 1)
    assert validate_solution(inst, PlacementSolution({1}, {(1, 0), (1, 2)})).feasible
