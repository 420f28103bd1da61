"""Maximum flow engines and an exhaustive min-cut oracle.

All engines work on a coalesced residual table: parallel arcs between the
same ordered pair are merged, and ``res[u][v]`` always holds
``c(u,v) - f(u,v) + f(v,u)`` so that pushing along an arc and cancelling a
reverse flow are the same operation. Neighbours are scanned in increasing
node id, which makes every engine fully deterministic.
"""

from __future__ import annotations

import enum
from collections import deque
from itertools import combinations

from .graph import FlowAssignment, FlowNetwork

BRUTE_FORCE_MAX_NODES = 20


class SolverEngine(str, enum.Enum):
    FORD_FULKERSON = "ford-fulkerson-dfs"
    EDMONDS_KARP = "edmonds-karp-bfs"
    DINIC = "dinic"

    @classmethod
    def parse(cls, name: str | SolverEngine) -> SolverEngine:
        if isinstance(name, SolverEngine):
            return name
        aliases = {"ff": cls.FORD_FULKERSON, "ek": cls.EDMONDS_KARP, "dinic": cls.DINIC}
        try:
            return aliases.get(name) or cls(name)
        except ValueError:
            raise ValueError(f"unknown engine {name!r}") from None


class _Residual:
    def __init__(self, net: FlowNetwork, flows=None):
        n = net.node_count
        self.n = n
        self.cap = [dict() for _ in range(n)]
        for arc in net.arcs:
            row = self.cap[arc.tail]
            row[arc.head] = row.get(arc.head, 0) + arc.capacity
        self.res = [dict() for _ in range(n)]
        for u in range(n):
            for v, c in self.cap[u].items():
                self.res[u][v] = self.res[u].get(v, 0) + c
                self.res[v].setdefault(u, 0)
        if flows is not None:
            for arc, f in zip(net.arcs, flows):
                self.res[arc.tail][arc.head] -= f
                self.res[arc.head][arc.tail] += f
        self.adj = [sorted(row) for row in self.res]

    def push(self, path: list[int], amount: int) -> None:
        for u, v in zip(path, path[1:]):
            self.res[u][v] -= amount
            self.res[v][u] += amount

    def bottleneck(self, path: list[int]) -> int:
        return min(self.res[u][v] for u, v in zip(path, path[1:]))

    def reachable(self, source: int) -> set[int]:
        seen = {source}
        stack = [source]
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if v not in seen and self.res[u][v] > 0:
                    seen.add(v)
                    stack.append(v)
        return seen

    def dfs_path(self, s: int, t: int) -> list[int] | None:
        # iterative DFS that explores the smallest-id neighbour first
        parent = {s: None}
        stack = [(s, iter(self.adj[s]))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if v not in parent and self.res[u][v] > 0:
                    parent[v] = u
                    if v == t:
                        return _unwind(parent, t)
                    stack.append((v, iter(self.adj[v])))
                    break
            else:
                stack.pop()
        return None

    def bfs_path(self, s: int, t: int) -> list[int] | None:
        parent = {s: None}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in parent and self.res[u][v] > 0:
                    parent[v] = u
                    if v == t:
                        return _unwind(parent, t)
                    queue.append(v)
        return None


def _unwind(parent: dict, t: int) -> list[int]:
    path = [t]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _augment_loop(r: _Residual, s: int, t: int, find) -> tuple[int, int]:
    total = steps = 0
    while (path := find(s, t)) is not None:
        amount = r.bottleneck(path)
        r.push(path, amount)
        total += amount
        steps += 1
    return total, steps


def _dinic(r: _Residual, s: int, t: int) -> tuple[int, int]:
    total = steps = 0
    while True:
        level = [-1] * r.n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in r.adj[u]:
                if level[v] < 0 and r.res[u][v] > 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        if level[t] < 0:
            return total, steps
        ptr = [0] * r.n
        # blocking flow: repeated DFS on the level graph with dead-end pruning
        while True:
            path = [s]
            while path and path[-1] != t:
                u = path[-1]
                adj = r.adj[u]
                while ptr[u] < len(adj):
                    v = adj[ptr[u]]
                    if level[v] == level[u] + 1 and r.res[u][v] > 0:
                        path.append(v)
                        break
                    ptr[u] += 1
                else:
                    path.pop()
                    if path:
                        ptr[path[-1]] += 1
            if not path:
                break
            amount = r.bottleneck(path)
            r.push(path, amount)
            total += amount
            steps += 1


def _extract(net: FlowNetwork, r: _Residual, total: int, steps: int) -> FlowAssignment:
    # net flow on each ordered pair, then spread over parallel arcs in input order
    remaining = {}
    for u in range(net.node_count):
        for v, c in r.cap[u].items():
            remaining[(u, v)] = max(0, c - r.res[u][v])
    flows = []
    for arc in net.arcs:
        key = (arc.tail, arc.head)
        f = min(arc.capacity, remaining[key])
        remaining[key] -= f
        flows.append(f)
    return FlowAssignment(tuple(flows), total, frozenset(r.reachable(net.source)), steps)


def max_flow(net: FlowNetwork, engine: SolverEngine | str = SolverEngine.FORD_FULKERSON) -> FlowAssignment:
    """Maximum ``source -> sink`` flow of ``net`` starting from the zero flow.

    Returns per-arc flows, the flow value and the source side of a minimum
    cut (nodes still reachable in the final residual graph).
    """
    engine = SolverEngine.parse(engine)
    r = _Residual(net)
    s, t = net.source, net.sink
    if engine is SolverEngine.FORD_FULKERSON:
        total, steps = _augment_loop(r, s, t, r.dfs_path)
    elif engine is SolverEngine.EDMONDS_KARP:
        total, steps = _augment_loop(r, s, t, r.bfs_path)
    else:
        total, steps = _dinic(r, s, t)
    return _extract(net, r, total, steps)


def compare_engines(net: FlowNetwork) -> dict[str, dict[str, int]]:
    """Flow value and augmentation count of every engine on ``net``.

    Iteration counts are the empirical cost measure; no asymptotic claim
    is checked here.
    """
    out = {}
    for engine in SolverEngine:
        res = max_flow(net, engine)
        out[engine.value] = {"total_kbps": res.total, "augmentations": res.augmentations}
    return out


def augmenting_path(net: FlowNetwork, assign: FlowAssignment, strategy: str = "bfs") -> list[int] | None:
    """A simple source-to-sink path with positive residual capacity, or None.

    ``None`` certifies that ``assign`` is already maximum.
    """
    r = _Residual(net, assign.flows)
    if strategy == "bfs":
        return r.bfs_path(net.source, net.sink)
    if strategy == "dfs":
        return r.dfs_path(net.source, net.sink)
    raise ValueError(f"unknown strategy {strategy!r}")


def brute_force_min_cut(net: FlowNetwork) -> int:
    """Minimum forward capacity over every source/sink separating partition."""
    if net.node_count > BRUTE_FORCE_MAX_NODES:
        raise ValueError(
            f"{net.node_count} nodes is too many for cut enumeration (limit {BRUTE_FORCE_MAX_NODES})"
        )
    others = [v for v in range(net.node_count) if v not in (net.source, net.sink)]
    arcs = [(a.tail, a.head, a.capacity) for a in net.arcs if a.capacity > 0]
    best = None
    for size in range(len(others) + 1):
        for extra in combinations(others, size):
            side = {net.source, *extra}
            cut = sum(c for u, v, c in arcs if u in side and v not in side)
            if best is None or cut < best:
                best = cut
    return best
