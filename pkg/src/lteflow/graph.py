"""Flow network representation, capacity units and file ingestion.

Capacities are integers in kbps. Text files carry Mbps with at most three
decimal places, so every value converts to kbps exactly.

Edge-list format, one directive per line, ``#`` starts a comment::

    nodes 4
    source 0
    sink 3
    link 0 1 2.2      # undirected, expanded to 0->1 and 1->0
    arc 1 3 5         # directed
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from functools import cached_property
from typing import Iterable, Sequence

KBPS_PER_MBPS = 1000


class ParseError(ValueError):
    """Malformed network or mesh description."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def mbps_to_kbps(value: str | int | float | Decimal) -> int:
    """Convert an Mbps quantity with at most 3 decimals to integer kbps."""
    try:
        dec = Decimal(str(value).strip())
    except InvalidOperation:
        raise ValueError(f"not a number: {value!r}") from None
    if not dec.is_finite():
        raise ValueError(f"not a finite number: {value!r}")
    if dec < 0:
        raise ValueError(f"capacity must be non-negative: {value!r}")
    kbps = dec * KBPS_PER_MBPS
    if kbps != kbps.to_integral_value():
        raise ValueError(f"more than 3 decimal places: {value!r}")
    return int(kbps)


def kbps_to_mbps_text(kbps: int) -> str:
    """Shortest exact decimal Mbps rendering of ``kbps``."""
    whole, frac = divmod(kbps, KBPS_PER_MBPS)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:03d}".rstrip("0")


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: int


@dataclass(frozen=True)
class Edge:
    """A declared connection; undirected edges stand for two full arcs."""

    u: int
    v: int
    capacity: int
    directed: bool = False


@dataclass(frozen=True)
class FlowNetwork:
    node_count: int
    edges: tuple[Edge, ...]
    source: int
    sink: int

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.node_count < 2:
            raise ValueError("a flow network needs at least two nodes")
        for name in ("source", "sink"):
            node = getattr(self, name)
            if not 0 <= node < self.node_count:
                raise ValueError(f"{name} {node} out of range 0..{self.node_count - 1}")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for e in self.edges:
            if not (0 <= e.u < self.node_count and 0 <= e.v < self.node_count):
                raise ValueError(f"edge {e.u}-{e.v} has an endpoint out of range")
            if e.u == e.v:
                raise ValueError(f"self loop at node {e.u}")
            if not isinstance(e.capacity, int) or e.capacity < 0:
                raise ValueError(f"edge {e.u}-{e.v}: capacity must be a non-negative integer")

    @cached_property
    def arcs(self) -> tuple[Arc, ...]:
        """Directed arcs in declaration order; a link yields u->v then v->u."""
        out = []
        for e in self.edges:
            out.append(Arc(e.u, e.v, e.capacity))
            if not e.directed:
                out.append(Arc(e.v, e.u, e.capacity))
        return tuple(out)

    def check_node(self, node: int) -> None:
        if not 0 <= node < self.node_count:
            raise ValueError(f"node {node} out of range 0..{self.node_count - 1}")

    def with_terminals(self, source: int | None = None, sink: int | None = None) -> FlowNetwork:
        return FlowNetwork(
            self.node_count,
            self.edges,
            self.source if source is None else source,
            self.sink if sink is None else sink,
        )

    @classmethod
    def from_arcs(cls, node_count: int, arcs: Iterable[tuple[int, int, int]], source: int, sink: int):
        """Build a network from directed ``(tail, head, kbps)`` triples."""
        return cls(node_count, tuple(Edge(u, v, c, directed=True) for u, v, c in arcs), source, sink)


@dataclass(frozen=True)
class FlowAssignment:
    """Per-arc flows (aligned with ``FlowNetwork.arcs``) plus a min-cut witness.

    ``augmentations`` counts the augmenting steps the solver took; it is
    informational and not part of the flow itself.
    """

    flows: tuple[int, ...]
    total: int
    min_cut: frozenset[int]
    augmentations: int = field(default=0, compare=False)


def zero_assignment(net: FlowNetwork) -> FlowAssignment:
    return FlowAssignment((0,) * len(net.arcs), 0, frozenset({net.source}))


def check_assignment(net: FlowNetwork, assign: FlowAssignment, *, check_cut: bool = True) -> None:
    """Raise ``AssertionError`` unless ``assign`` is a feasible flow on ``net``
    whose total matches its source/sink balance (and, optionally, its cut)."""
    arcs = net.arcs
    if len(assign.flows) != len(arcs):
        raise AssertionError("flow vector length does not match arc count")
    balance = [0] * net.node_count
    for arc, f in zip(arcs, assign.flows):
        if not 0 <= f <= arc.capacity:
            raise AssertionError(f"arc {arc.tail}->{arc.head}: flow {f} outside [0, {arc.capacity}]")
        balance[arc.tail] -= f
        balance[arc.head] += f
    for node, b in enumerate(balance):
        if node not in (net.source, net.sink) and b != 0:
            raise AssertionError(f"conservation violated at node {node} (imbalance {b})")
    if -balance[net.source] != assign.total or balance[net.sink] != assign.total:
        raise AssertionError("total does not equal net source outflow / sink inflow")
    if check_cut:
        cut = assign.min_cut
        if net.source not in cut or net.sink in cut:
            raise AssertionError("min_cut must contain the source and not the sink")
        crossing = sum(a.capacity for a in arcs if a.tail in cut and a.head not in cut)
        if crossing != assign.total:
            raise AssertionError(f"cut capacity {crossing} differs from total {assign.total}")


def residual_capacity(net: FlowNetwork, assign: FlowAssignment, tail: int, head: int) -> int:
    """Remaining capacity from ``tail`` to ``head``: c - f forward plus back-flow."""
    net.check_node(tail)
    net.check_node(head)
    total = 0
    for arc, f in zip(net.arcs, assign.flows):
        if arc.tail == tail and arc.head == head:
            total += arc.capacity - f
        elif arc.tail == head and arc.head == tail:
            total += f
    return total


# --------------------------------------------------------------------- parsing


def _tokens(text: str) -> Iterable[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _int_arg(tok: str, lineno: int, what: str) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None
    if value < 0:
        raise ParseError(f"{what} must be non-negative, got {value}", lineno)
    return value


def _capacity_arg(tok: str, lineno: int) -> int:
    try:
        return mbps_to_kbps(tok)
    except ValueError as exc:
        raise ParseError(f"bad capacity: {exc}", lineno) from None


class _Directives:
    """Shared line-level parsing for network and mesh files."""

    def __init__(self, allowed: Sequence[str]):
        self.allowed = set(allowed)
        self.scalars: dict[str, tuple[int, int]] = {}
        self.edges: list[tuple[Edge, int]] = []
        self.offers: list[tuple[int, int, int]] = []

    def feed(self, text: str) -> None:
        for lineno, toks in _tokens(text):
            key, args = toks[0].lower(), toks[1:]
            if key not in self.allowed:
                raise ParseError(f"unknown directive {toks[0]!r}", lineno)
            if key in ("nodes", "source", "sink"):
                if len(args) != 1:
                    raise ParseError(f"'{key}' takes exactly one argument", lineno)
                if key in self.scalars:
                    raise ParseError(f"duplicate '{key}' declaration", lineno)
                self.scalars[key] = (_int_arg(args[0], lineno, key), lineno)
            elif key in ("link", "arc"):
                if len(args) != 3:
                    raise ParseError(f"'{key}' expects <u> <v> <mbps>", lineno)
                u = _int_arg(args[0], lineno, "node id")
                v = _int_arg(args[1], lineno, "node id")
                cap = _capacity_arg(args[2], lineno)
                self.edges.append((Edge(u, v, cap, directed=key == "arc"), lineno))
            elif key == "offer":
                if len(args) != 2:
                    raise ParseError("'offer' expects <node> <mbps>", lineno)
                node = _int_arg(args[0], lineno, "node id")
                self.offers.append((node, _capacity_arg(args[1], lineno), lineno))

    def require(self, key: str) -> int:
        if key not in self.scalars:
            raise ParseError(f"missing '{key}' declaration")
        return self.scalars[key][0]


def _validate_edges(edges: Sequence[tuple[Edge, int]], lo: int, hi: int) -> None:
    for e, lineno in edges:
        for node in (e.u, e.v):
            if not lo <= node <= hi:
                raise ParseError(f"node {node} out of range {lo}..{hi}", lineno)
        if e.u == e.v:
            raise ParseError(f"self loop at node {e.u}", lineno)


def parse_edge_list(text: str) -> FlowNetwork:
    d = _Directives(("nodes", "source", "sink", "link", "arc"))
    d.feed(text)
    n = d.require("nodes")
    source, sink = d.require("source"), d.require("sink")
    for key in ("source", "sink"):
        value, lineno = d.scalars[key]
        if value >= n:
            raise ParseError(f"{key} {value} out of range 0..{n - 1}", lineno)
    if source == sink:
        raise ParseError("source and sink must differ", d.scalars["sink"][1])
    _validate_edges(d.edges, 0, n - 1)
    return FlowNetwork(n, tuple(e for e, _ in d.edges), source, sink)


def parse_json(text: str) -> FlowNetwork:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    for key in ("nodes", "source", "sink"):
        if key not in doc:
            raise ParseError(f"missing '{key}' field")
        if not isinstance(doc[key], int) or isinstance(doc[key], bool) or doc[key] < 0:
            raise ParseError(f"'{key}' must be a non-negative integer")
    edges = []
    for key, directed in (("links", False), ("arcs", True)):
        for i, item in enumerate(doc.get(key, [])):
            if not (isinstance(item, list) and len(item) == 3):
                raise ParseError(f"{key}[{i}] must be [u, v, mbps]")
            u, v, cap = item
            if not all(isinstance(x, int) and not isinstance(x, bool) for x in (u, v)):
                raise ParseError(f"{key}[{i}]: node ids must be integers")
            if isinstance(cap, bool):
                raise ParseError(f"{key}[{i}]: bad capacity")
            try:
                edges.append(Edge(u, v, mbps_to_kbps(cap), directed=directed))
            except ValueError as exc:
                raise ParseError(f"{key}[{i}]: bad capacity: {exc}") from None
    try:
        return FlowNetwork(doc["nodes"], tuple(edges), doc["source"], doc["sink"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def parse_network(text: str, format: str = "edge-list") -> FlowNetwork:
    """Parse a network description in ``edge-list`` or ``json`` format."""
    if format == "edge-list":
        return parse_edge_list(text)
    if format == "json":
        return parse_json(text)
    raise ValueError(f"unknown network format {format!r}")


def serialize_network(net: FlowNetwork, format: str = "edge-list") -> str:
    if format == "json":
        doc = {
            "nodes": net.node_count,
            "source": net.source,
            "sink": net.sink,
            "links": [[e.u, e.v, _mbps_number(e.capacity)] for e in net.edges if not e.directed],
            "arcs": [[e.u, e.v, _mbps_number(e.capacity)] for e in net.edges if e.directed],
        }
        return json.dumps(doc, indent=2) + "\n"
    if format != "edge-list":
        raise ValueError(f"unknown network format {format!r}")
    lines = [f"nodes {net.node_count}", f"source {net.source}", f"sink {net.sink}"]
    for e in net.edges:
        kind = "arc" if e.directed else "link"
        lines.append(f"{kind} {e.u} {e.v} {kbps_to_mbps_text(e.capacity)}")
    return "\n".join(lines) + "\n"


def _mbps_number(kbps: int) -> int | float:
    if kbps % KBPS_PER_MBPS == 0:
        return kbps // KBPS_PER_MBPS
    # repr of this float is the shortest decimal, which has <= 3 places
    return float(kbps_to_mbps_text(kbps))


def load_network(path: str) -> FlowNetwork:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    fmt = "json" if path.endswith(".json") else "edge-list"
    return parse_network(text, fmt)
