"""Network topology families and standard requests.

Node ids are zero-padded strings, so sorted order matches the natural
left-to-right or row-major order of each family.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from graphdist.graph_core import SimpleGraph
from graphdist.network import Network, Node

FAMILIES = ("line", "ring", "grid", "random", "tree", "complete")


def node_ids(n: int) -> list[str]:
    width = max(2, len(str(n - 1)))
    return [f"n{i:0{width}d}" for i in range(n)]


def network_from_graph(g: SimpleGraph, persistent_pairs: bool = False) -> Network:
    return Network([Node(v) for v in sorted(g.vertices)], g.sorted_edges(), persistent_pairs)


def line(n: int) -> SimpleGraph:
    ids = node_ids(n)
    return SimpleGraph.from_edges(zip(ids, ids[1:]), ids)


def ring(n: int) -> SimpleGraph:
    if n < 3:
        return line(n)
    ids = node_ids(n)
    return SimpleGraph.from_edges([*zip(ids, ids[1:]), (ids[-1], ids[0])], ids)


def grid(n: int) -> SimpleGraph:
    """Row-major grid with ``ceil(sqrt(n))`` columns, truncated to ``n`` nodes."""
    cols = int(np.ceil(np.sqrt(n)))
    ids = node_ids(n)
    edges = []
    for i in range(n):
        if (i + 1) % cols and i + 1 < n:
            edges.append((ids[i], ids[i + 1]))
        if i + cols < n:
            edges.append((ids[i], ids[i + cols]))
    return SimpleGraph.from_edges(edges, ids)


def complete(n: int) -> SimpleGraph:
    ids = node_ids(n)
    return SimpleGraph.from_edges(combinations(ids, 2), ids)


def random_tree(n: int, seed: int = 0) -> SimpleGraph:
    rng = np.random.default_rng(seed)
    ids = node_ids(n)
    edges = [(ids[int(rng.integers(i))], ids[i]) for i in range(1, n)]
    return SimpleGraph.from_edges(edges, ids)


def random_connected(n: int, p: float = 0.3, seed: int = 0) -> SimpleGraph:
    """A random spanning tree plus each remaining pair with probability ``p``."""
    rng = np.random.default_rng(seed)
    tree = random_tree(n, seed=int(rng.integers(2**31)))
    extra = [e for e in combinations(sorted(tree.vertices), 2) if rng.random() < p]
    return SimpleGraph.from_edges([*tree.edges, *extra], tree.vertices)


def family(name: str, n: int, seed: int = 0) -> SimpleGraph:
    if name == "line":
        return line(n)
    if name == "ring":
        return ring(n)
    if name == "grid":
        return grid(n)
    if name == "complete":
        return complete(n)
    if name == "tree":
        return random_tree(n, seed)
    if name == "random":
        return random_connected(n, seed=seed)
    raise ValueError(f"unknown topology family {name!r}; choose from {FAMILIES}")


def pathological_target(n: int) -> SimpleGraph:
    """Matching of mirror-image nodes ``i <-> n-1-i`` on a line of ``n`` nodes.

    For odd ``n`` the middle node is not part of the request.
    """
    ids = node_ids(n)
    half = n // 2
    return SimpleGraph.from_edges((ids[i], ids[n - 1 - i]) for i in range(half))


def pathological_pairs(n: int) -> int:
    """Bell pairs for routing every mirror pair along the line: sum of path lengths."""
    return sum(n + 1 - 2 * i for i in range(1, n // 2 + 1))
