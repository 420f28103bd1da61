import random

import pytest
from hypothesis import given, settings, strategies as st

from lteflow.graph import Edge, FlowAssignment, FlowNetwork, check_assignment, zero_assignment
from lteflow.maxflow import SolverEngine, augmenting_path, brute_force_min_cut, compare_engines, max_flow

from conftest import random_network

ENGINES = list(SolverEngine)


@pytest.mark.parametrize("engine", ENGINES)
def test_single_arc(engine):
    net = FlowNetwork.from_arcs(2, [(0, 1, 5000)], 0, 1)
    res = max_flow(net, engine)
    assert res.total == 5000
    assert res.min_cut == {0}


@pytest.mark.parametrize("engine", ENGINES)
def test_disconnected(engine):
    res = max_flow(FlowNetwork(2, (), 0, 1), engine)
    assert res.total == 0
    assert res.min_cut == {0}


@pytest.mark.parametrize("engine", ENGINES)
def test_diamond(diamond, engine):
    res = max_flow(diamond, engine)
    # 5000 from brute_force_min_cut over the 4 partitions {s}, {s,a}, {s,b}, {s,a,b}
    assert res.total == 5000
    assert res.min_cut == {0}
    check_assignment(diamond, res)


@pytest.mark.parametrize("engine", ENGINES)
def test_sink_unreachable_reports_reachable_set(engine):
    net = FlowNetwork.from_arcs(4, [(0, 1, 3000), (1, 2, 1000), (3, 2, 5000)], 0, 3)
    res = max_flow(net, engine)
    assert res.total == 0
    assert res.min_cut == {0, 1, 2}


@pytest.mark.parametrize("engine", ENGINES)
def test_parallel_arcs_redistributed_in_input_order(engine):
    net = FlowNetwork.from_arcs(3, [(0, 1, 2000), (0, 1, 3000), (1, 2, 4000)], 0, 2)
    res = max_flow(net, engine)
    assert res.total == 4000
    assert res.flows == (2000, 2000, 4000)


def test_engine_aliases():
    assert SolverEngine.parse("ff") is SolverEngine.FORD_FULKERSON
    assert SolverEngine.parse("edmonds-karp-bfs") is SolverEngine.EDMONDS_KARP
    with pytest.raises(ValueError):
        SolverEngine.parse("push-relabel")


def test_augmenting_path_zero_flow():
    net = FlowNetwork.from_arcs(2, [(0, 1, 5)], 0, 1)
    assert augmenting_path(net, zero_assignment(net), "dfs") == [0, 1]
    assert augmenting_path(net, zero_assignment(net), "bfs") == [0, 1]


def test_augmenting_path_saturated():
    net = FlowNetwork.from_arcs(2, [(0, 1, 5)], 0, 1)
    full = FlowAssignment((5,), 5, frozenset({0}))
    assert augmenting_path(net, full, "bfs") is None
    assert augmenting_path(net, full, "dfs") is None


def test_augmenting_path_diamond_needs_cross_arc(diamond):
    # 2 along s->b->t and 2 along s->a->t leaves only s->a->b->t (bottleneck 1)
    assign = FlowAssignment((2000, 2000, 2000, 2000, 0), 4000, frozenset({0}))
    check_assignment(diamond, assign, check_cut=False)
    for strategy in ("bfs", "dfs"):
        assert augmenting_path(diamond, assign, strategy) == [0, 1, 2, 3]
    after = FlowAssignment((3000, 2000, 2000, 3000, 1000), 5000, frozenset({0}))
    assert augmenting_path(diamond, after, "bfs") is None
    assert after.total == brute_force_min_cut(diamond)


def test_augmenting_path_bad_strategy(diamond):
    with pytest.raises(ValueError):
        augmenting_path(diamond, zero_assignment(diamond), "astar")


def test_dfs_prefers_smallest_neighbour():
    net = FlowNetwork.from_arcs(4, [(0, 2, 1), (0, 1, 1), (1, 3, 1), (2, 3, 1)], 0, 3)
    assert augmenting_path(net, zero_assignment(net), "dfs") == [0, 1, 3]


def test_brute_force_examples(diamond):
    assert brute_force_min_cut(FlowNetwork.from_arcs(2, [(0, 1, 5000)], 0, 1)) == 5000
    assert brute_force_min_cut(diamond) == 5000
    parallel = FlowNetwork(2, (Edge(0, 1, 2000), Edge(0, 1, 3000)), 0, 1)
    assert brute_force_min_cut(parallel) == 5000


def test_brute_force_size_limit():
    with pytest.raises(ValueError):
        brute_force_min_cut(FlowNetwork(21, (), 0, 1))


def test_engines_agree_with_oracle_on_random_networks():
    rng = random.Random(4242)
    for _ in range(200):
        net = random_network(rng)
        expected = brute_force_min_cut(net)
        for engine in ENGINES:
            res = max_flow(net, engine)
            assert res.total == expected
            check_assignment(net, res)


@st.composite
def small_networks(draw):
    n = draw(st.integers(2, 7))
    node = st.integers(0, n - 1)
    arcs = draw(st.lists(st.tuples(node, node, st.integers(0, 9999)).filter(lambda a: a[0] != a[1]), max_size=18))
    s, t = draw(st.lists(node, min_size=2, max_size=2, unique=True))
    return FlowNetwork.from_arcs(n, arcs, s, t)


@settings(max_examples=150, deadline=None)
@given(small_networks())
def test_duality_property(net):
    expected = brute_force_min_cut(net)
    for engine in ENGINES:
        res = max_flow(net, engine)
        assert res.total == expected
        check_assignment(net, res)
        # no augmenting path is left once the flow is maximum
        assert augmenting_path(net, res, "bfs") is None


@settings(max_examples=60, deadline=None)
@given(small_networks())
def test_augmentations_bounded_by_flow_value(net):
    res = max_flow(net, SolverEngine.FORD_FULKERSON)
    assert res.augmentations <= res.total


def test_deterministic_output():
    rng = random.Random(9)
    net = random_network(rng)
    for engine in ENGINES:
        assert max_flow(net, engine).flows == max_flow(net, engine).flows


def test_compare_engines(diamond):
    report = compare_engines(diamond)
    assert set(report) == {e.value for e in SolverEngine}
    assert {r["total_kbps"] for r in report.values()} == {5000}
    assert all(r["augmentations"] >= 1 for r in report.values())
