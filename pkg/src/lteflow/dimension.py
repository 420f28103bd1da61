"""Uniform link dimensioning of an eNB mesh by binary search over max-flow.

Every eNB ``i`` injects its own load ``C_i`` and the sink eNB (the one
anchored to the core) must absorb the sum ``Y``. A dummy node 0 feeds each
offering node through an arc of capacity ``C_i``; every mesh link gets the
same capacity ``M`` in both directions. The smallest ``M`` on the search grid
for which the max flow reaches ``Y`` is the answer, and each link is then
provisioned at the flow it actually carries at that ``M``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .graph import Edge, FlowAssignment, FlowNetwork, ParseError, _Directives, _validate_edges
from .maxflow import SolverEngine, max_flow

DUMMY_SOURCE = 0
DEFAULT_GRANULARITY = 1000


class DimensioningError(ValueError):
    pass


class ZeroDemand(DimensioningError):
    def __init__(self):
        super().__init__("total offered load Y is zero; nothing to dimension")


class InfeasibleAtY(DimensioningError):
    def __init__(self, nodes: Sequence[int]):
        self.nodes = tuple(nodes)
        super().__init__(
            "offering node(s) with no path to the sink: " + ", ".join(map(str, self.nodes))
        )


@dataclass(frozen=True)
class MeshSpec:
    """Undirected mesh over nodes ``1..node_count`` with per-node loads in kbps."""

    node_count: int
    links: tuple[tuple[int, int], ...]
    offered: Mapping[int, int]
    sink: int

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(tuple(l) for l in self.links))
        object.__setattr__(self, "offered", dict(sorted(self.offered.items())))
        n = self.node_count
        if n < 2:
            raise ValueError("a mesh needs at least two nodes")
        if not 1 <= self.sink <= n:
            raise ValueError(f"sink {self.sink} out of range 1..{n}")
        seen = set()
        for i, j in self.links:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"link {i}-{j} out of range 1..{n}")
            if i == j:
                raise ValueError(f"self loop at node {i}")
            if frozenset((i, j)) in seen:
                raise ValueError(f"duplicate link {i}-{j}")
            seen.add(frozenset((i, j)))
        for node, load in self.offered.items():
            if not 1 <= node <= n:
                raise ValueError(f"offer at node {node} out of range 1..{n}")
            if not isinstance(load, int) or load < 0:
                raise ValueError(f"offer at node {node} must be a non-negative integer kbps")
        if self.offered.get(self.sink, 0):
            raise ValueError("the sink node cannot offer traffic")

    @property
    def total_offered(self) -> int:
        return sum(self.offered.values())

    def disconnected(self) -> list[int]:
        """Offering nodes (load > 0) with no mesh path to the sink."""
        adj = {v: [] for v in range(1, self.node_count + 1)}
        for i, j in self.links:
            adj[i].append(j)
            adj[j].append(i)
        seen = {self.sink}
        queue = deque([self.sink])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return [v for v, c in self.offered.items() if c > 0 and v not in seen]


@dataclass(frozen=True)
class ProbeStep:
    low: int
    high: int
    capacity: int
    flow: int


@dataclass(frozen=True)
class DimensioningResult:
    optimal_M: int
    link_capacities: dict[tuple[int, int], int]
    achieved_flow: int
    iterations: int
    granularity: int
    offered_total: int
    trace: tuple[ProbeStep, ...] = ()
    # True when the exit value of the search loop was infeasible and had to be stepped up
    stepped_up: bool = False
    engine: str = SolverEngine.FORD_FULKERSON.value
    flow: FlowAssignment | None = field(default=None, repr=False, compare=False)

    def load_balance_ratio(self) -> float | None:
        """max/mean of the nonzero provisioned capacities (descriptive only)."""
        used = [c for c in self.link_capacities.values() if c > 0]
        if not used:
            return None
        return max(used) / (sum(used) / len(used))


def build_augmented(spec: MeshSpec, M: int) -> FlowNetwork:
    """Mesh plus dummy source 0 feeding each offering node its own load."""
    edges = [Edge(DUMMY_SOURCE, i, c, directed=True) for i, c in spec.offered.items()]
    edges += [Edge(i, j, M) for i, j in spec.links]
    return FlowNetwork(spec.node_count + 1, tuple(edges), DUMMY_SOURCE, spec.sink)


def feasible(spec: MeshSpec, M: int, engine: SolverEngine | str = SolverEngine.FORD_FULKERSON):
    """``(max_flow == Y, flow)`` for uniform link capacity ``M``.

    The dummy-source arcs cap the flow at Y, so reaching Y and exceeding it
    are the same test.
    """
    flow = max_flow(build_augmented(spec, M), engine)
    return flow.total == spec.total_offered, flow


def link_flows(spec: MeshSpec, net: FlowNetwork, flow: FlowAssignment) -> dict[tuple[int, int], int]:
    """Net (opposite-direction-cancelled) flow magnitude on every mesh link."""
    arcs = net.arcs
    n_offer = len(spec.offered)
    out = {}
    for idx, link in enumerate(spec.links):
        fwd = flow.flows[n_offer + 2 * idx]
        back = flow.flows[n_offer + 2 * idx + 1]
        assert arcs[n_offer + 2 * idx].tail == link[0]
        out[link] = abs(fwd - back)
    return out


def provisioned_network(spec: MeshSpec, capacities: Mapping[tuple[int, int], int]) -> FlowNetwork:
    """Augmented network with each link at its own provisioned capacity."""
    edges = [Edge(DUMMY_SOURCE, i, c, directed=True) for i, c in spec.offered.items()]
    edges += [Edge(i, j, capacities[(i, j)]) for i, j in spec.links]
    return FlowNetwork(spec.node_count + 1, tuple(edges), DUMMY_SOURCE, spec.sink)


def dimension(
    spec: MeshSpec,
    granularity: int = DEFAULT_GRANULARITY,
    engine: SolverEngine | str = SolverEngine.FORD_FULKERSON,
) -> DimensioningResult:
    """Smallest multiple of ``granularity`` (kbps) that carries every load to the sink.

    Binary search with ``L = 1, R = ceil(Y / granularity)`` grid units,
    ``M = floor((L + R) / 2)``; success moves ``R`` to ``M - 1``, failure moves
    ``L`` to ``M + 1``, and the loop stops at ``L >= R``. That loop can leave
    ``L`` one unit below the true minimum, so the exit value is checked and
    stepped up once if needed.
    """
    if granularity < 1:
        raise ValueError("granularity must be at least 1 kbps")
    engine = SolverEngine.parse(engine)
    Y = spec.total_offered
    if Y == 0:
        raise ZeroDemand()
    lost = spec.disconnected()
    if lost:
        raise InfeasibleAtY(lost)

    low, high = 1, -(-Y // granularity)
    trace = []
    while low < high:
        mid = (low + high) // 2
        ok, flow = feasible(spec, mid * granularity, engine)
        trace.append(ProbeStep(low * granularity, high * granularity, mid * granularity, flow.total))
        if ok:
            high = mid - 1
        else:
            low = mid + 1

    ok, flow = feasible(spec, low * granularity, engine)
    stepped_up = False
    if not ok:
        low += 1
        stepped_up = True
        ok, flow = feasible(spec, low * granularity, engine)
    if not ok:
        raise AssertionError("binary search invariant broken: stepped-up capacity infeasible")

    M = low * granularity
    net = build_augmented(spec, M)
    return DimensioningResult(
        optimal_M=M,
        link_capacities=link_flows(spec, net, flow),
        achieved_flow=flow.total,
        iterations=len(trace),
        granularity=granularity,
        offered_total=Y,
        trace=tuple(trace),
        stepped_up=stepped_up,
        engine=engine.value,
        flow=flow,
    )


def linear_scan(spec: MeshSpec, granularity: int = DEFAULT_GRANULARITY) -> int:
    """Reference answer: first feasible grid value scanning upward from one unit."""
    Y = spec.total_offered
    units = 1
    while True:
        if feasible(spec, units * granularity, SolverEngine.EDMONDS_KARP)[0]:
            return units * granularity
        if units * granularity >= Y:
            raise InfeasibleAtY(spec.disconnected())
        units += 1


# ----------------------------------------------------------------- mesh files


def parse_mesh(text: str) -> MeshSpec:
    """Mesh file: ``nodes <n>`` (ids 1..n), ``sink``, ``link <u> <v>``, ``offer <node> <mbps>``.

    ``link`` lines may carry a trailing Mbps weight, which is ignored: the
    dimensioner assigns every link the same trial capacity.
    """
    d = _Directives(("nodes", "sink", "link", "offer"))
    d.feed(_pad_links(text))
    n = d.require("nodes")
    sink, sink_line = d.scalars.get("sink", (None, None))
    if sink is None:
        raise ParseError("missing 'sink' declaration")
    if not 1 <= sink <= n:
        raise ParseError(f"sink {sink} out of range 1..{n}", sink_line)
    _validate_edges(d.edges, 1, n)
    offered = {}
    for node, kbps, lineno in d.offers:
        if not 1 <= node <= n:
            raise ParseError(f"node {node} out of range 1..{n}", lineno)
        if node in offered:
            raise ParseError(f"duplicate offer for node {node}", lineno)
        if node == sink and kbps:
            raise ParseError("the sink node cannot offer traffic", lineno)
        offered[node] = kbps
    seen = set()
    for e, lineno in d.edges:
        if frozenset((e.u, e.v)) in seen:
            raise ParseError(f"duplicate link {e.u}-{e.v}", lineno)
        seen.add(frozenset((e.u, e.v)))
    return MeshSpec(n, tuple((e.u, e.v) for e, _ in d.edges), offered, sink)


def _pad_links(text: str) -> str:
    # let `link u v` (no weight) through the shared three-argument parser
    out = []
    for raw in text.splitlines():
        body, sep, comment = raw.partition("#")
        toks = body.split()
        if len(toks) == 3 and toks[0].lower() == "link":
            body = body.rstrip() + " 0"
        out.append(body + sep + comment)
    return "\n".join(out)


def load_mesh(path: str) -> MeshSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_mesh(fh.read())
