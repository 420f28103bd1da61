import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lteflow.dimension import (
    InfeasibleAtY,
    MeshSpec,
    ZeroDemand,
    build_augmented,
    dimension,
    feasible,
    linear_scan,
    load_mesh,
    parse_mesh,
    provisioned_network,
)
from lteflow.graph import ParseError
from lteflow.maxflow import SolverEngine, brute_force_min_cut, max_flow

from conftest import SAMPLES, random_mesh


def test_build_augmented_triangle(triangle):
    net = build_augmented(triangle, 2000)
    assert net.node_count == 4 and net.source == 0 and net.sink == 3
    arcs = [(a.tail, a.head, a.capacity) for a in net.arcs]
    assert arcs[:2] == [(0, 1, 2000), (0, 2, 2000)]
    assert sorted(arcs[2:]) == sorted(
        [(1, 2, 2000), (2, 1, 2000), (1, 3, 2000), (3, 1, 2000), (2, 3, 2000), (3, 2, 2000)]
    )


def test_zero_capacity_carries_nothing(triangle):
    net = build_augmented(triangle, 0)
    assert all(a.capacity == 0 for a in net.arcs if a.tail != 0)
    assert max_flow(net).total == 0


@pytest.mark.parametrize("M, ok, flow", [(1000, False, 2000), (2000, True, 4000)])
def test_feasible_triangle(triangle, M, ok, flow):
    is_ok, assign = feasible(triangle, M)
    assert (is_ok, assign.total) == (ok, flow)
    assert assign.total == brute_force_min_cut(build_augmented(triangle, M))


def test_dimension_triangle(triangle):
    res = dimension(triangle)
    assert res.optimal_M == 2000 == linear_scan(triangle)
    assert res.link_capacities == {(1, 2): 0, (1, 3): 2000, (2, 3): 2000}
    assert res.achieved_flow == 4000
    # the textbook loop exits at L = 1 Mbps here, which is infeasible
    assert res.stepped_up


def test_single_link():
    spec = MeshSpec(2, ((1, 2),), {1: 7000}, 2)
    res = dimension(spec)
    assert res.optimal_M == 7000
    assert res.link_capacities == {(1, 2): 7000}


def test_disconnected_node():
    spec = MeshSpec(4, ((1, 4), (2, 3)), {1: 1000, 2: 1000, 3: 0}, 4)
    with pytest.raises(InfeasibleAtY) as info:
        dimension(spec)
    assert info.value.nodes == (2,)


def test_zero_demand():
    with pytest.raises(ZeroDemand):
        dimension(MeshSpec(2, ((1, 2),), {1: 0}, 2))


def test_fine_granularity():
    spec = MeshSpec(3, ((1, 3), (2, 3)), {1: 2200, 2: 1300}, 3)
    assert dimension(spec, granularity=1).optimal_M == 2200
    assert dimension(spec, granularity=1000).optimal_M == 3000


def test_granularity_not_dividing_Y():
    spec = MeshSpec(2, ((1, 2),), {1: 2500}, 2)
    assert dimension(spec).optimal_M == 3000 == linear_scan(spec)


def test_mesh_validation():
    with pytest.raises(ValueError):
        MeshSpec(3, ((1, 3),), {3: 1000}, 3)
    with pytest.raises(ValueError):
        MeshSpec(3, ((1, 4),), {1: 1000}, 3)
    with pytest.raises(ValueError):
        MeshSpec(3, ((1, 3),), {1: -5}, 3)
    with pytest.raises(ValueError, match="duplicate"):
        MeshSpec(3, ((1, 3), (3, 1)), {1: 5}, 3)


def test_parse_mesh():
    spec = parse_mesh("nodes 3\nsink 3\nlink 1 2\nlink 1 3 9.5\nlink 2 3\noffer 1 2\noffer 2 2.2\n")
    assert spec.links == ((1, 2), (1, 3), (2, 3))
    assert spec.offered == {1: 2000, 2: 2200}
    assert spec.total_offered == 4200


@pytest.mark.parametrize(
    "text",
    [
        "nodes 3\nlink 1 2\n",
        "nodes 3\nsink 4\n",
        "nodes 3\nsink 3\noffer 3 1\n",
        "nodes 3\nsink 3\noffer 1 1\noffer 1 2\n",
        "nodes 3\nsink 3\nlink 0 1\n",
        "nodes 3\nsink 3\nsource 1\n",
        "nodes 3\nsink 3\narc 1 2 3\n",
        "nodes 3\nsink 3\nlink 1 2\nlink 2 1\n",
    ],
)
def test_parse_mesh_errors(text):
    with pytest.raises(ParseError):
        parse_mesh(text)


def test_sample_mesh_at_Y_is_feasible():
    spec = load_mesh(str(SAMPLES / "mesh_low.mesh"))
    Y = spec.total_offered
    assert Y == 8 * 2000
    ok, flow = feasible(spec, Y)
    assert ok and flow.total == Y


@pytest.mark.parametrize("name", ["mesh_low.mesh", "mesh_high.mesh"])
def test_sample_meshes_self_consistent(name):
    spec = load_mesh(str(SAMPLES / name))
    res = dimension(spec)
    assert res.achieved_flow == spec.total_offered
    assert max(res.link_capacities.values()) <= res.optimal_M
    again = max_flow(provisioned_network(spec, res.link_capacities))
    assert again.total == spec.total_offered


def test_iteration_bound_and_trace():
    rng = random.Random(11)
    for _ in range(30):
        spec = random_mesh(rng)
        for g in (1, 1000):
            res = dimension(spec, g)
            Y = spec.total_offered
            assert res.iterations <= math.ceil(math.log2(max(Y / g, 1))) + 1
            assert len(res.trace) == res.iterations
            for step in res.trace:
                assert step.low <= step.capacity <= step.high


def test_minimality_against_linear_scan():
    rng = random.Random(2024)
    for _ in range(40):
        spec = random_mesh(rng, max_nodes=7)
        res = dimension(spec)
        assert res.optimal_M == linear_scan(spec)
        assert max(res.link_capacities.values(), default=0) <= res.optimal_M
        assert max_flow(provisioned_network(spec, res.link_capacities)).total == spec.total_offered


@pytest.mark.parametrize("engine", list(SolverEngine))
def test_engines_agree_on_optimum(engine):
    rng = random.Random(5)
    for _ in range(15):
        spec = random_mesh(rng)
        assert dimension(spec, engine=engine).optimal_M == dimension(spec).optimal_M


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 12_000), st.integers(0, 12_000))
def test_feasibility_is_monotone(seed, a, b):
    spec = random_mesh(random.Random(seed))
    lo, hi = sorted((a, b))
    if feasible(spec, lo)[0]:
        assert feasible(spec, hi)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 4))
def test_optimum_nondecreasing_under_uniform_scaling(seed, factor):
    spec = random_mesh(random.Random(seed))
    scaled = MeshSpec(spec.node_count, spec.links, {v: c * factor for v, c in spec.offered.items()}, spec.sink)
    assert dimension(scaled).optimal_M >= dimension(spec).optimal_M
