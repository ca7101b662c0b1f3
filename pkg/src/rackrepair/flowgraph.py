"""Partial information-flow graphs and an exact max-flow min-cut oracle.

Storage vertex v is split into nodes ("in", v) and ("out", v) joined by an
edge of capacity r.  When v fails, a direct inheritor u is created: it keeps
s(v) symbols through an inheritance edge out(v) -> in(u) and downloads beta
from each of D active helpers.  A data collector (DC) joins K active
vertices with edges of unbounded capacity.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

__all__ = [
    "INF",
    "PartialFlowGraph",
    "build_initial",
    "apply_failure",
    "attach_dc",
    "min_cut",
    "brute_force_min_cut",
    "worst_case_graph",
    "random_evolution",
]

INF = math.inf
SOURCE = "S"
SINK = "DC"


@dataclass
class PartialFlowGraph:
    r: Fraction
    edges: list = field(default_factory=list)  # (u, v, capacity, kind)
    active: dict = field(default_factory=dict)  # vertex id -> bool
    chain: dict = field(default_factory=dict)  # vertex id -> chain (initial vertex) id
    progenitor: dict = field(default_factory=dict)  # vertex id -> failed vertex or None
    surviving: dict = field(default_factory=dict)  # vertex id -> s(v) used on its failure
    order: list = field(default_factory=list)  # vertex ids by creation time
    dc: tuple | None = None

    # -- structure --------------------------------------------------------------

    def nodes(self) -> list:
        out = [SOURCE]
        for v in self.order:
            out += [("in", v), ("out", v)]
        if self.dc is not None:
            out.append(SINK)
        return out

    def active_vertices(self) -> list:
        return [v for v in self.order if self.active[v]]

    def _new_vertex(self, chain: int, progenitor) -> int:
        v = len(self.order)
        self.order.append(v)
        self.active[v] = True
        self.chain[v] = chain
        self.progenitor[v] = progenitor
        self.edges.append((("in", v), ("out", v), self.r, "storage"))
        return v

    def audit(self) -> None:
        """Check acyclicity, capacities and the inheritor-chain properties."""
        nodes = self.nodes()
        index = {n: i for i, n in enumerate(nodes)}
        indeg = {n: 0 for n in nodes}
        adj = {n: [] for n in nodes}
        for u, v, cap, kind in self.edges:
            if u not in index or v not in index:
                raise AssertionError(f"edge {u}->{v} references an unknown node")
            adj[u].append(v)
            indeg[v] += 1
            if kind == "storage" and cap != self.r:
                raise AssertionError("storage edge capacity differs from r")
            if kind == "collector" and cap != INF:
                raise AssertionError("collector edge must be unbounded")
        queue = deque(n for n in nodes if indeg[n] == 0)
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for m in adj[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        if seen != len(nodes):
            raise AssertionError("graph has a cycle")
        inheritors: dict = {}
        for v, p in self.progenitor.items():
            if p is not None:
                if p in inheritors:
                    raise AssertionError(f"vertex {p} has two direct inheritors")
                inheritors[p] = v
        for v in self.order:
            chains = [self.chain[u[1]] for u, w, _, kind in self.edges
                      if w == ("in", v) and kind == "helper"]
            if len(chains) != len(set(chains)):
                raise AssertionError(f"two helper edges from one chain into vertex {v}")
        per_chain = {}
        for v in self.order:
            if self.active[v]:
                per_chain[self.chain[v]] = per_chain.get(self.chain[v], 0) + 1
        if any(c != 1 for c in per_chain.values()) or len(per_chain) != len(set(self.chain.values())):
            raise AssertionError("each chain must have exactly one active vertex")

    # -- export -----------------------------------------------------------------

    def to_json(self) -> dict:
        def name(n):
            return n if isinstance(n, str) else f"{n[0]}{n[1]}"

        def cap(c):
            return "inf" if c == INF else str(Fraction(c))

        return {
            "nodes": [name(n) for n in self.nodes()],
            "edges": [{"from": name(u), "to": name(v), "capacity": cap(c), "kind": k}
                      for u, v, c, k in self.edges],
            "active": [v for v in self.order if self.active[v]],
        }

    def to_dot(self) -> str:
        def name(n):
            return n if isinstance(n, str) else f"{n[0]}{n[1]}"

        lines = ["digraph partial_flow {", "  rankdir=LR;"]
        for u, v, c, k in self.edges:
            label = "inf" if c == INF else str(Fraction(c))
            lines.append(f'  "{name(u)}" -> "{name(v)}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def build_initial(N: int, r) -> PartialFlowGraph:
    if N < 1:
        raise ValueError("need N >= 1")
    g = PartialFlowGraph(Fraction(r))
    for i in range(N):
        v = g._new_vertex(i, None)
        g.edges.append((SOURCE, ("in", v), g.r, "source"))
    return g


def apply_failure(g: PartialFlowGraph, v: int, s_v, helpers: Sequence[int], beta) -> int:
    """Fail v and create its direct inheritor; returns the new vertex id."""
    if g.dc is not None:
        raise ValueError("cannot evolve a graph after the data collector is attached")
    if not g.active.get(v, False):
        raise ValueError(f"vertex {v} is not active")
    helpers = list(helpers)
    if len(set(helpers)) != len(helpers):
        raise ValueError("repeated helper")
    for h in helpers:
        if h == v or not g.active.get(h, False):
            raise ValueError(f"helper {h} is not an active vertex other than {v}")
    if s_v < 0:
        raise ValueError("surviving count must be non-negative")
    g.active[v] = False
    g.surviving[v] = Fraction(s_v)
    u = g._new_vertex(g.chain[v], v)
    g.edges.append((("out", v), ("in", u), Fraction(s_v), "inherit"))
    for h in helpers:
        g.edges.append((("out", h), ("in", u), Fraction(beta), "helper"))
    return u


def attach_dc(g: PartialFlowGraph, targets: Sequence[int]) -> PartialFlowGraph:
    targets = list(targets)
    if len(set(targets)) != len(targets):
        raise ValueError("data collector targets must be distinct")
    for t in targets:
        if not g.active.get(t, False):
            raise ValueError(f"data collector target {t} is not active")
    g.dc = tuple(targets)
    for t in targets:
        g.edges.append((("out", t), SINK, INF, "collector"))
    return g


# ---------------------------------------------------------------------------
# Max flow


def _integer_network(g: PartialFlowGraph):
    finite = [Fraction(c) for _, _, c, _ in g.edges if c != INF]
    scale = math.lcm(*(c.denominator for c in finite)) if finite else 1
    big = sum(int(c * scale) for c in finite) + 1
    nodes = g.nodes()
    index = {n: i for i, n in enumerate(nodes)}
    arcs = []
    for u, v, c, _ in g.edges:
        cap = big if c == INF else int(Fraction(c) * scale)
        arcs.append((index[u], index[v], cap))
    return len(nodes), index, arcs, scale, big


def _dinic(n: int, arcs, s: int, t: int) -> int:
    head = [[] for _ in range(n)]
    to, cap = [], []
    for u, v, c in arcs:
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0)
    flow = 0
    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for e in head[u]:
                if cap[e] > 0 and level[to[e]] < 0:
                    level[to[e]] = level[u] + 1
                    queue.append(to[e])
        if level[t] < 0:
            return flow
        it = [0] * n

        def push(u, limit):
            if u == t:
                return limit
            while it[u] < len(head[u]):
                e = head[u][it[u]]
                v = to[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    got = push(v, min(limit, cap[e]))
                    if got:
                        cap[e] -= got
                        cap[e ^ 1] += got
                        return got
                it[u] += 1
            return 0

        while True:
            got = push(s, math.inf)
            if not got:
                break
            flow += got


def min_cut(g: PartialFlowGraph) -> Fraction:
    """Exact S-DC min cut; unbounded edges are never part of a finite cut."""
    if g.dc is None:
        raise ValueError("attach a data collector first")
    n, index, arcs, scale, big = _integer_network(g)
    value = _dinic(n, arcs, index[SOURCE], index[SINK])
    if value >= big:
        raise AssertionError("min cut is unbounded")
    return Fraction(value, scale)


def brute_force_min_cut(g: PartialFlowGraph, max_edges: int = 12) -> Fraction:
    """Minimum over subsets of finite edges whose removal separates S from DC."""
    if g.dc is None:
        raise ValueError("attach a data collector first")
    finite = [i for i, e in enumerate(g.edges) if e[2] != INF]
    if len(finite) > max_edges:
        raise ValueError(f"{len(finite)} finite edges exceeds the enumeration limit {max_edges}")
    best = None
    for size in range(len(finite) + 1):
        for removed in itertools.combinations(finite, size):
            cost = sum((Fraction(g.edges[i][2]) for i in removed), Fraction(0))
            if best is not None and cost >= best:
                continue
            if not _reachable(g, set(removed)):
                best = cost
    return best if best is not None else Fraction(0)


def _reachable(g: PartialFlowGraph, removed: set) -> bool:
    adj: dict = {}
    for i, (u, v, c, _) in enumerate(g.edges):
        if i not in removed and c != 0:
            adj.setdefault(u, []).append(v)
    seen = {SOURCE}
    stack = [SOURCE]
    while stack:
        u = stack.pop()
        if u == SINK:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


# ---------------------------------------------------------------------------
# Graph families


def worst_case_graph(N: int, K: int, D: int, beta, s: Sequence[int], r) -> PartialFlowGraph:
    """K consecutive failures arranged to realize the family's minimum cut.

    The nodes with the K smallest surviving counts fail one after another,
    the largest of them first, so that the failure with the fewest outside
    helpers keeps the fewest symbols.  Each failure is helped by the D most
    recently created active vertices; the DC reads the K inheritors.
    """
    if len(s) != N:
        raise ValueError("one surviving count per node is required")
    if not 1 <= K <= N or not 1 <= D <= N - 1:
        raise ValueError("need 1 <= K <= N and 1 <= D <= N-1")
    g = build_initial(N, r)
    ranked = sorted(range(N), key=lambda i: (s[i], i))[:K]
    failing = list(reversed(ranked))
    inheritors = []
    for v in failing:
        candidates = [u for u in reversed(g.order) if g.active[u] and u != v]
        u = apply_failure(g, v, s[v], candidates[:D], beta)
        inheritors.append(u)
    return attach_dc(g, inheritors)


def random_evolution(N: int, K: int, D: int, beta, s: Sequence[int], r, steps: int,
                     rng_seed: int = 0) -> PartialFlowGraph:
    """Random failures with uniformly chosen helpers, then a random DC."""
    if len(s) != N:
        raise ValueError("one surviving count per node is required")
    if not 1 <= K <= N or not 1 <= D <= N - 1:
        raise ValueError("need 1 <= K <= N and 1 <= D <= N-1")
    rng = random.Random(rng_seed)
    g = build_initial(N, r)
    for _ in range(steps):
        act = g.active_vertices()
        v = rng.choice(act)
        helpers = rng.sample([u for u in act if u != v], D)
        apply_failure(g, v, s[g.chain[v]], helpers, beta)
    return attach_dc(g, rng.sample(g.active_vertices(), K))
