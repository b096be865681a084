"""Steiner trees on unit-weight network graphs.

``steiner_approx`` is the metric-closure MST construction (ratio <= 2);
``steiner_exact`` is the Dreyfus-Wagner dynamic program, usable as an oracle
on small instances.  All ties are broken by sorted node id.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass

from graphdist.graph_core import SimpleGraph, _edge

EXACT_MAX_TERMINALS = 10
EXACT_MAX_VERTICES = 20


class SteinerError(ValueError):
    pass


class NoTree(SteinerError):
    """The terminals do not lie in one connected component."""


class BudgetExceeded(SteinerError):
    pass


@dataclass(frozen=True)
class SteinerInstance:
    graph: SimpleGraph
    terminals: frozenset

    def __post_init__(self) -> None:
        object.__setattr__(self, "terminals", frozenset(self.terminals))
        missing = self.terminals - self.graph.vertices
        if missing:
            raise SteinerError(f"terminals not in graph: {sorted(missing)}")

    def without(self, terminal) -> SteinerInstance:
        if terminal not in self.terminals:
            raise SteinerError(f"{terminal!r} is not a terminal")
        return SteinerInstance(self.graph, self.terminals - {terminal})


@dataclass(frozen=True)
class SteinerTree:
    edges: frozenset
    terminals: frozenset

    @property
    def cost(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> frozenset:
        if not self.edges:
            return frozenset(self.terminals)
        return frozenset(v for e in self.edges for v in e)

    def as_graph(self) -> SimpleGraph:
        return SimpleGraph.from_edges(self.edges, self.nodes)

    @property
    def leaves(self) -> list:
        g = self.as_graph()
        return sorted(v for v in g.vertices if g.degree(v) == 1)

    def is_valid(self, inst: SteinerInstance) -> bool:
        """Tree, inside the network, spans all terminals, every leaf a terminal."""
        if not self.edges:
            return len(inst.terminals) <= 1
        if any(not inst.graph.has_edge(*e) for e in self.edges):
            return False
        g = self.as_graph()
        if len(g.edges) != len(g.vertices) - 1 or not _connected(g):
            return False
        if not inst.terminals <= g.vertices:
            return False
        return all(v in inst.terminals for v in self.leaves)


def _connected(g: SimpleGraph) -> bool:
    if not g.vertices:
        return True
    start = min(g.vertices)
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in g.adjacency[v]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(g.vertices)


def bfs(g: SimpleGraph, source) -> tuple[dict, dict]:
    """Distances and parents from ``source``, exploring neighbours in sorted order."""
    dist = {source: 0}
    parent = {source: None}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in sorted(g.adjacency[v]):
            if w not in dist:
                dist[w] = dist[v] + 1
                parent[w] = v
                queue.append(w)
    return dist, parent


def _path(parent: dict, target) -> list:
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def prune(edges: Iterable, terminals: Iterable) -> frozenset:
    """Repeatedly strip non-terminal leaves."""
    edges = set(edges)
    terminals = set(terminals)
    while True:
        deg: dict = {}
        for a, b in edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        dead = {v for v, d in deg.items() if d == 1 and v not in terminals}
        if not dead:
            return frozenset(edges)
        edges = {e for e in edges if e[0] not in dead and e[1] not in dead}


def _spanning_tree(g: SimpleGraph, root) -> set:
    _, parent = bfs(g, root)
    return {_edge(v, p) for v, p in parent.items() if p is not None}


def steiner_approx(inst: SteinerInstance) -> SteinerTree:
    """Metric-closure MST 2-approximation (Kou-Markowsky-Berman)."""
    terms = sorted(inst.terminals)
    if len(terms) <= 1:
        return SteinerTree(frozenset(), inst.terminals)
    g = inst.graph
    searches = {t: bfs(g, t) for t in terms}
    for t in terms[1:]:
        if t not in searches[terms[0]][0]:
            raise NoTree(f"terminals {terms[0]!r} and {t!r} are disconnected")
    # Prim on the terminal metric closure
    in_tree = {terms[0]}
    closure_edges = []
    while len(in_tree) < len(terms):
        best = None
        for u in sorted(in_tree):
            dist = searches[u][0]
            for v in terms:
                if v in in_tree:
                    continue
                key = (dist[v], u, v)
                if best is None or key < best:
                    best = key
        _, u, v = best
        closure_edges.append((u, v))
        in_tree.add(v)
    sub_edges = set()
    for u, v in closure_edges:
        path = _path(searches[u][1], v)
        sub_edges.update(_edge(a, b) for a, b in zip(path, path[1:]))
    sub = SimpleGraph.from_edges(sub_edges)
    edges = prune(_spanning_tree(sub, terms[0]), terms)
    return SteinerTree(edges, inst.terminals)


def steiner_exact(inst: SteinerInstance) -> SteinerTree:
    """Optimal Steiner tree via the Dreyfus-Wagner subset DP."""
    terms = sorted(inst.terminals)
    k = len(terms)
    if k <= 1:
        return SteinerTree(frozenset(), inst.terminals)
    if k > EXACT_MAX_TERMINALS or len(inst.graph) > EXACT_MAX_VERTICES:
        raise BudgetExceeded(
            f"exact Steiner DP limited to {EXACT_MAX_TERMINALS} terminals "
            f"and {EXACT_MAX_VERTICES} vertices"
        )
    g = inst.graph
    verts = sorted(g.vertices)
    searches = {v: bfs(g, v) for v in verts}
    for t in terms[1:]:
        if t not in searches[terms[0]][0]:
            raise NoTree(f"terminals {terms[0]!r} and {t!r} are disconnected")
    reach = [v for v in verts if v in searches[terms[0]][0]]
    inf = float("inf")

    def d(u, v):
        return searches[u][0].get(v, inf)

    full = (1 << k) - 1
    # cost[mask][v]: cheapest tree spanning terminals of mask plus v
    cost = [dict() for _ in range(full + 1)]
    via = [dict() for _ in range(full + 1)]
    split = [dict() for _ in range(full + 1)]
    for i, t in enumerate(terms):
        for v in reach:
            cost[1 << i][v] = d(t, v)
            via[1 << i][v] = None
    for mask in sorted(range(1, full + 1), key=lambda m: (bin(m).count("1"), m)):
        if mask & (mask - 1) == 0:
            continue
        low = mask & -mask
        merged = {}
        for u in reach:
            best = (inf, None)
            sub = (mask - 1) & mask
            while sub:
                if sub & low:
                    c = cost[sub][u] + cost[mask ^ sub][u]
                    if c < best[0]:
                        best = (c, sub)
                sub = (sub - 1) & mask
            merged[u] = best[0]
            split[mask][u] = best[1]
        for v in reach:
            best = (inf, None)
            for u in reach:
                c = merged[u] + d(u, v)
                if c < best[0]:
                    best = (c, u)
            cost[mask][v] = best[0]
            via[mask][v] = best[1]

    edges = set()

    def add_path(u, v):
        path = _path(searches[u][1], v)
        edges.update(_edge(a, b) for a, b in zip(path, path[1:]))

    def build(mask, v):
        if mask & (mask - 1) == 0:
            add_path(terms[mask.bit_length() - 1], v)
            return
        u = via[mask][v]
        add_path(u, v)
        s = split[mask][u]
        build(s, u)
        build(mask ^ s, u)

    build(full, terms[0])
    tree = SteinerTree(prune(edges, terms), inst.terminals)
    if tree.cost != cost[full][terms[0]] or not tree.is_valid(inst):
        raise SteinerError("internal error: reconstructed tree disagrees with DP cost")
    return tree


def remove_terminal(
    tree: SteinerTree, inst: SteinerInstance, terminal
) -> tuple[SteinerInstance, SteinerTree]:
    """Drop ``terminal`` and shrink the tree for the remaining terminals.

    The previous tree is pruned; a fresh approximation replaces it only if
    strictly cheaper, so the cost never increases.
    """
    new_inst = inst.without(terminal)
    pruned = SteinerTree(prune(tree.edges, new_inst.terminals), new_inst.terminals)
    if len(new_inst.terminals) <= 1:
        return new_inst, SteinerTree(frozenset(), new_inst.terminals)
    fresh = steiner_approx(new_inst)
    return new_inst, fresh if fresh.cost < pruned.cost else pruned


def tree_to_dot(inst: SteinerInstance, tree: SteinerTree, name: str = "steiner") -> str:
    """The network in grey with the tree in black; terminals dotted."""
    dot = inst.graph.to_dot(name=name, highlight=tree.edges)
    lines = dot.splitlines()
    for t in sorted(inst.terminals):
        lines.insert(-1, f'  "{t}" [style=dotted, penwidth=2];')
    return "\n".join(lines) + "\n"
