"""Graph-state rewrite calculus on plain simple graphs.

Vertices are opaque, orderable ids (ints for qubits, strings for network
nodes).  Every operation is pure: it returns a new :class:`SimpleGraph` and
never touches its argument.
"""

from __future__ import annotations

import json
from collections.abc import Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from itertools import combinations

from graphdist import clifford
from graphdist.clifford import Clifford1

VertexId = Hashable
Edge = tuple


class GraphError(ValueError):
    pass


class VertexNotFound(GraphError, KeyError):
    pass


class SelfLoopForbidden(GraphError):
    pass


def _edge(a, b) -> tuple:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class SimpleGraph:
    """An undirected simple graph with canonically ordered edges."""

    vertices: frozenset = frozenset()
    edges: frozenset = frozenset()
    _adj: Mapping = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        vertices = frozenset(self.vertices)
        edges = set()
        for e in self.edges:
            a, b = e
            if a == b:
                raise SelfLoopForbidden(f"self-loop at {a!r}")
            if a not in vertices or b not in vertices:
                raise VertexNotFound(f"edge {e!r} has an endpoint outside the vertex set")
            edges.add(_edge(a, b))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", frozenset(edges))

    @classmethod
    def from_edges(cls, edges: Iterable, vertices: Iterable = ()) -> SimpleGraph:
        edges = [tuple(e) for e in edges]
        vs = set(vertices)
        for a, b in edges:
            vs.update((a, b))
        return cls(frozenset(vs), frozenset(edges))

    @property
    def adjacency(self) -> Mapping:
        if self._adj is None:
            adj = {v: set() for v in self.vertices}
            for a, b in self.edges:
                adj[a].add(b)
                adj[b].add(a)
            object.__setattr__(self, "_adj", {v: frozenset(n) for v, n in adj.items()})
        return self._adj

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator:
        return iter(sorted(self.vertices))

    def has_edge(self, a, b) -> bool:
        return a != b and _edge(a, b) in self.edges

    def degree(self, a) -> int:
        return len(neighborhood(self, a))

    def sorted_edges(self) -> list[tuple]:
        return sorted(self.edges)

    def relabel(self, mapping: Mapping) -> SimpleGraph:
        return SimpleGraph.from_edges(
            ((mapping[a], mapping[b]) for a, b in self.edges),
            (mapping[v] for v in self.vertices),
        )

    def subgraph(self, keep: Iterable) -> SimpleGraph:
        keep = frozenset(keep) & self.vertices
        return SimpleGraph(keep, frozenset(e for e in self.edges if e[0] in keep and e[1] in keep))

    def add_vertex(self, v) -> SimpleGraph:
        return SimpleGraph(self.vertices | {v}, self.edges)

    def validate(self) -> None:
        """Re-check the simple-graph invariants; raises :class:`GraphError`."""
        SimpleGraph(self.vertices, self.edges)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    def to_dict(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": [list(e) for e in self.sorted_edges()],
        }

    @classmethod
    def from_json(cls, text: str) -> SimpleGraph:
        data = json.loads(text)
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Mapping) -> SimpleGraph:
        try:
            return cls.from_edges((tuple(e) for e in data["edges"]), data["vertices"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"malformed graph description: {exc}") from exc

    def to_dot(
        self, name: str = "G", highlight: Iterable | None = None, labels: Mapping | None = None
    ) -> str:
        """Graphviz source; when given, ``highlight`` edges are drawn black over grey."""
        marked = None if highlight is None else {_edge(*e) for e in highlight}
        lines = [f"graph {name} {{", "  node [shape=circle];"]
        for v in sorted(self.vertices):
            label = labels.get(v, v) if labels else v
            lines.append(f'  "{v}" [label="{label}"];')
        for a, b in self.sorted_edges():
            hit = marked is None or (a, b) in marked
            colour = "black" if hit else "grey"
            width = ", penwidth=2" if marked and hit else ""
            lines.append(f'  "{a}" -- "{b}" [color={colour}{width}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _require(g: SimpleGraph, *vs) -> None:
    for v in vs:
        if v not in g.vertices:
            raise VertexNotFound(f"vertex {v!r} not in graph")


def neighborhood(g: SimpleGraph, a) -> frozenset:
    _require(g, a)
    return g.adjacency[a]


def local_complement(g: SimpleGraph, a) -> SimpleGraph:
    """Toggle every edge inside the neighbourhood of ``a``."""
    nb = sorted(neighborhood(g, a))
    edges = set(g.edges)
    for u, v in combinations(nb, 2):
        edges ^= {(u, v)}
    return SimpleGraph(g.vertices, frozenset(edges))


def delete_vertex(g: SimpleGraph, a) -> SimpleGraph:
    _require(g, a)
    return SimpleGraph(g.vertices - {a}, frozenset(e for e in g.edges if a not in e))


def toggle_edge(g: SimpleGraph, a, b) -> SimpleGraph:
    if a == b:
        raise SelfLoopForbidden(f"cannot toggle a self-loop at {a!r}")
    _require(g, a, b)
    return SimpleGraph(g.vertices, g.edges ^ {_edge(a, b)})


def y_measure_rewrite(g: SimpleGraph, a) -> SimpleGraph:
    return delete_vertex(local_complement(g, a), a)


def z_measure_rewrite(g: SimpleGraph, a) -> SimpleGraph:
    return delete_vertex(g, a)


# Byproducts left on the former neighbours by a Pauli measurement, as the
# Clifford B with  post-measurement state = B |G'>.
_Y_BYPRODUCT = {1: clifford.SQRT_Z.inverse(), -1: clifford.SQRT_Z}
_Z_BYPRODUCT = {1: clifford.I, -1: clifford.Z}


def measurement_byproduct(g: SimpleGraph, a, basis: str, outcome: int) -> dict:
    """Local Cliffords left on ``N_a`` after measuring ``a`` in ``basis``.

    Local complementation and edge toggles are exact and have no byproduct.
    """
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    table = {"Y": _Y_BYPRODUCT, "Z": _Z_BYPRODUCT}[basis]
    return {b: table[outcome] for b in sorted(neighborhood(g, a))}


@dataclass(frozen=True)
class LocalCliffordFrame:
    """Pending single-qubit Cliffords: the physical state is ``(prod C_v)|G>``.

    Only non-identity entries are stored.
    """

    entries: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {v: c for v, c in dict(self.entries).items() if not c.is_identity}
        )

    def __getitem__(self, v) -> Clifford1:
        return self.entries.get(v, clifford.I)

    def __iter__(self):
        return iter(sorted(self.entries))

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalCliffordFrame) and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(frozenset(self.entries.items()))

    @property
    def is_identity(self) -> bool:
        return not self.entries

    def apply(self, v, c: Clifford1) -> LocalCliffordFrame:
        """Record that ``c`` is applied physically after the current frame on ``v``."""
        out = dict(self.entries)
        out[v] = self[v].then(c)
        return LocalCliffordFrame(out)

    def absorb(self, byproducts: Mapping) -> LocalCliffordFrame:
        """Fold in byproducts ``B`` that sit *under* the current frame."""
        out = dict(self.entries)
        for v, b in byproducts.items():
            out[v] = b.then(self[v])
        return LocalCliffordFrame(out)

    def drop(self, v) -> LocalCliffordFrame:
        return LocalCliffordFrame({k: c for k, c in self.entries.items() if k != v})

    def restrict(self, vertices: Iterable) -> LocalCliffordFrame:
        keep = set(vertices)
        return LocalCliffordFrame({k: c for k, c in self.entries.items() if k in keep})

    def to_dict(self) -> dict:
        return {str(v): self.entries[v].name for v in sorted(self.entries)}


def star_graph(center, leaves: Iterable) -> SimpleGraph:
    leaves = list(leaves)
    return SimpleGraph.from_edges(((center, leaf) for leaf in leaves), [center, *leaves])


def path_graph(vertices: Iterable) -> SimpleGraph:
    vs = list(vertices)
    return SimpleGraph.from_edges(zip(vs, vs[1:]), vs)


def complete_graph(vertices: Iterable) -> SimpleGraph:
    vs = list(vertices)
    return SimpleGraph.from_edges(combinations(vs, 2), vs)
