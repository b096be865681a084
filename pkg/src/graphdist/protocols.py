"""Distribution protocols compiled to schedules.

Every protocol drives a fresh :class:`~graphdist.network.Network` run: each
action is validated and applied as it is emitted, so a compiled schedule is
known to be executable and its counters are exact.  Measurement outcomes
default to +1; every measurement is followed by outcome-conditioned
corrections, so the same schedule is valid for sampled outcomes too.
"""

from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations

from graphdist import graph_core as gc
from graphdist import steiner as stn
from graphdist.graph_core import SimpleGraph
from graphdist.network import (
    CZ,
    Action,
    Correct,
    GenerateBell,
    LocalComplement,
    Measure,
    Network,
    NetworkError,
    Prepare,
    Schedule,
)

STRATEGIES = ("decorated", "star_cover")


class ProtocolError(NetworkError):
    pass


class InfeasibleRequest(ProtocolError):
    """Terminals are disconnected or not part of the network."""


class NotDecorated(ProtocolError):
    pass


@dataclass(frozen=True)
class GhzRequest:
    terminals: tuple
    center: str | None = None

    def __post_init__(self) -> None:
        terms = tuple(sorted(set(self.terminals)))
        if len(terms) < 2:
            raise ValueError("a GHZ request needs at least two terminals")
        if self.center is not None and self.center not in terms:
            raise ValueError(f"center {self.center!r} is not a terminal")
        object.__setattr__(self, "terminals", terms)


@dataclass(frozen=True)
class GraphRequest:
    target: SimpleGraph
    strategy: str = "decorated"

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        if len(self.target) < 1:
            raise ValueError("empty target graph")

    @property
    def terminals(self) -> tuple:
        return tuple(sorted(self.target.vertices))


def request_from_dict(data: Mapping, strategy: str | None = None) -> GhzRequest | GraphRequest:
    """Parse ``{"type": "ghz"|"graph", "terminals": [...], "target_edges": [...], "strategy": ...}``."""
    kind = data.get("type")
    terminals = [str(t) for t in data.get("terminals", [])]
    if kind == "ghz":
        return GhzRequest(tuple(terminals), data.get("center"))
    if kind == "graph":
        edges = [(str(u), str(v)) for u, v in data.get("target_edges", [])]
        target = SimpleGraph.from_edges(edges, terminals)
        return GraphRequest(target, strategy or data.get("strategy", "decorated"))
    raise ValueError(f"unknown request type {kind!r}")


def request_to_dict(req: GhzRequest | GraphRequest) -> dict:
    if isinstance(req, GhzRequest):
        out = {"type": "ghz", "terminals": list(req.terminals)}
        if req.center is not None:
            out["center"] = req.center
        return out
    return {
        "type": "graph",
        "terminals": list(req.terminals),
        "target_edges": [list(e) for e in req.target.sorted_edges()],
        "strategy": req.strategy,
    }


@dataclass
class CostReport:
    bell_pairs: int
    time_steps: int
    bound_bell: int
    bound_steps: int
    network_size: int
    rounds: list = field(default_factory=list)

    @property
    def within_bounds(self) -> bool:
        return self.bell_pairs <= self.bound_bell and self.time_steps <= self.bound_steps

    def to_dict(self) -> dict:
        return {
            "bell_pairs": self.bell_pairs,
            "time_steps": self.time_steps,
            "bound_bell": self.bound_bell,
            "bound_steps": self.bound_steps,
            "network_size": self.network_size,
            "within_bounds": self.within_bounds,
            "rounds": self.rounds,
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


# -- helpers -------------------------------------------------------------------


def _solve(inst: stn.SteinerInstance, method: str) -> stn.SteinerTree:
    try:
        if method == "exact":
            return stn.steiner_exact(inst)
        if method == "approx":
            return stn.steiner_approx(inst)
    except stn.NoTree as exc:
        raise InfeasibleRequest(str(exc)) from exc
    raise ValueError(f"unknown Steiner method {method!r}")


def _instance(net: Network, terminals: Iterable) -> stn.SteinerInstance:
    terminals = frozenset(terminals)
    missing = terminals - net.graph.vertices
    if missing:
        raise InfeasibleRequest(f"terminals not in the network: {sorted(missing)}")
    return stn.SteinerInstance(net.graph, terminals)


def _measure(net: Network, q: int, basis: str, outcome: int | None) -> list[Action]:
    """Measure ``q`` and undo the byproduct on its neighbours for either outcome."""
    g = net.state.graph
    plus = gc.measurement_byproduct(g, q, basis, 1)
    minus = gc.measurement_byproduct(g, q, basis, -1)
    emitted = [net.apply(Measure(q, basis, outcome))]
    for n in sorted(plus):
        fix_p, fix_m = plus[n].inverse(), minus[n].inverse()
        if fix_p.is_identity and fix_m.is_identity:
            continue
        emitted.append(net.apply(Correct(n, fix_p, fix_m, q)))
    return emitted


def _bell(net: Network, a: str, b: str) -> tuple[int, int]:
    """Generate a pair on channel (a, b); returns (qubit at a, qubit at b)."""
    qa, qb = net.new_qubit(), net.new_qubit()
    net.apply(GenerateBell((a, b), (qa, qb)))
    return qa, qb


# -- star expansion and GHZ ---------------------------------------------------------


def star_expansion(
    net: Network,
    b: int,
    node: str,
    keep: bool,
    a0: int | None = None,
    partners: Iterable[int] | None = None,
    outcome: int | None = 1,
) -> list[Action]:
    """Extend the star centred on ``b`` across the Bell pairs held at ``node``.

    ``a0`` is the qubit of ``node`` adjacent to ``b``; ``partners`` are the
    other qubits of ``node``, each the local half of a Bell pair.  Afterwards
    ``b`` is adjacent to every remote half, and also to ``a0`` iff ``keep``.
    Both default to the qubits found at ``node``.
    """
    g = net.state.graph
    here = net.state.qubits_at(node)
    if a0 is None:
        cands = [q for q in here if g.has_edge(q, b)]
        if len(cands) != 1:
            raise ProtocolError(f"node {node!r} needs exactly one qubit adjacent to {b}")
        a0 = cands[0]
    if a0 not in here or not g.has_edge(a0, b):
        raise ProtocolError(f"qubit {a0} at {node!r} is not adjacent to the star centre {b}")
    partners = [q for q in here if q != a0] if partners is None else list(partners)
    for q in partners:
        nb = gc.neighborhood(g, q)
        if q not in here or len(nb) != 1 or net.state.location[next(iter(nb))] == node:
            raise ProtocolError(f"qubit {q} at {node!r} is not half of a Bell pair")
    emitted: list[Action] = []
    if not partners and keep:
        return emitted
    group = [a0, *partners]
    for u, v in combinations(group, 2):
        emitted.append(net.apply(CZ(u, v)))
    emitted.append(net.apply(LocalComplement(a0)))
    if keep:
        for q in partners:
            emitted.append(net.apply(CZ(a0, q)))
    else:
        emitted.extend(_measure(net, a0, "Z", outcome))
    for q in partners:
        emitted.extend(_measure(net, q, "Y", outcome))
    return emitted


def _distribute_star(
    net: Network, tree: stn.SteinerTree, terminals: frozenset, root, outcome
) -> tuple[int, dict]:
    """Star over ``terminals`` centred at ``root`` (a leaf of ``tree``), in the current step."""
    tg = tree.as_graph()
    if tg.degree(root) != 1:
        raise ProtocolError(f"{root!r} is not a leaf of the routing tree")
    (first,) = tg.adjacency[root]
    b, a0 = _bell(net, root, first)
    leaves = {}
    queue = deque([(first, a0, root)])
    while queue:
        node, head, parent = queue.popleft()
        children = sorted(c for c in tg.adjacency[node] if c != parent)
        pairs = [(c, *_bell(net, node, c)) for c in children]
        keep = node in terminals
        star_expansion(net, b, node, keep, a0=head, partners=[p for _, p, _ in pairs], outcome=outcome)
        if keep:
            leaves[node] = head
        for c, _, remote in pairs:
            queue.append((c, remote, node))
    return b, leaves


def _recenter(net: Network, old: int, new: int) -> None:
    """Move the centre of a star from ``old`` to leaf ``new`` by two local complementations."""
    net.apply(LocalComplement(old))
    net.apply(LocalComplement(new))


def _ghz_round(net: Network, terminals, method: str, center, outcome) -> tuple[dict, int, dict]:
    """One GHZ distribution in the current step; returns (node->qubit, centre qubit, round info)."""
    inst = _instance(net, terminals)
    tree = _solve(inst, method)
    leaves = tree.leaves
    root = center if center in leaves else leaves[0]
    b, got = _distribute_star(net, tree, inst.terminals, root, outcome)
    qubits = {root: b, **got}
    centre = b
    if center is not None and center != root:
        _recenter(net, b, qubits[center])
        centre = qubits[center]
    net.schedule.retain |= set(qubits.values())
    info = {
        "round": None,
        "leader": root,
        "center": center if center is not None else root,
        "terminals": sorted(inst.terminals),
        "bell_pairs": tree.cost,
        "tree_edges": [list(e) for e in sorted(tree.edges)],
        "step": net.step,
    }
    return qubits, centre, info


def distribute_ghz(
    net: Network,
    req: GhzRequest,
    steiner: str = "approx",
    outcome: int | None = 1,
    seed: int = 0,
) -> tuple[Schedule, CostReport]:
    """Star graph over ``req.terminals`` in a single time step."""
    run = net.fresh(seed=seed)
    run.begin_step()
    qubits, centre, info = _ghz_round(run, req.terminals, steiner, req.center, outcome)
    info["round"] = 1
    sched = run.schedule
    sched.outputs = dict(qubits)
    sched.expected = gc.star_graph(centre, sorted(q for q in qubits.values() if q != centre))
    run.finish()
    n = len(net.nodes)
    report = CostReport(sched.bell_pairs, sched.time_steps, n - 1, 1, n, [info])
    return sched, report


def distribute_bell_repeater(
    net: Network, a: str, b: str, outcome: int | None = 1, seed: int = 0
) -> tuple[Schedule, CostReport]:
    """Bell pair between ``a`` and ``b`` by entanglement swapping along a shortest path.

    Every link gets one Bell pair; each interior repeater joins its two
    halves with a CZ and measures both in Y.
    """
    if a == b:
        raise ValueError("endpoints must differ")
    inst = _instance(net, (a, b))
    dist, parent = stn.bfs(net.graph, a)
    if b not in dist:
        raise InfeasibleRequest(f"{a!r} and {b!r} are disconnected")
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    run = net.fresh(seed=seed)
    run.begin_step()
    links = [_bell(run, u, v) for u, v in zip(path, path[1:])]
    for (_, left), (right, _) in zip(links, links[1:]):
        run.apply(CZ(left, right))
        _measure(run, left, "Y", outcome)
        _measure(run, right, "Y", outcome)
    ends = (links[0][0], links[-1][1])
    run.schedule.outputs = {a: ends[0], b: ends[1]}
    run.schedule.expected = gc.path_graph(ends)
    run.finish()
    sched = run.schedule
    n = len(net.nodes)
    info = {
        "round": 1,
        "leader": a,
        "center": a,
        "terminals": sorted(inst.terminals),
        "bell_pairs": len(path) - 1,
        "tree_edges": [list(gc._edge(u, v)) for u, v in zip(path, path[1:])],
        "step": 1,
    }
    return sched, CostReport(sched.bell_pairs, sched.time_steps, n - 1, 1, n, [info])


# -- edge-decorated complete graph -------------------------------------------------------


def _edge_decorated(run: Network, terminals, method: str, outcome) -> tuple[list, int]:
    """Rounds of shrinking GHZ states, then local wiring into the decorated graph.

    Returns the per-round info and the index in the last step where the
    local (channel-free) tail begins.
    """
    inst = _instance(run, terminals)
    tree = _solve(inst, method)
    rounds = []
    centres: dict = {}
    decor: dict = {}
    order = []
    while len(inst.terminals) >= 2:
        run.begin_step()
        leader = tree.leaves[0]
        b, leaves = _distribute_star(run, tree, inst.terminals, leader, outcome)
        centres[leader] = b
        order.append(leader)
        for v, q in leaves.items():
            decor[gc._edge(leader, v)] = q
        run.schedule.retain |= {b, *leaves.values()}
        run.schedule.outputs[leader] = b
        run.schedule.decorators.update({gc._edge(leader, v): q for v, q in leaves.items()})
        rounds.append(
            {
                "round": len(rounds) + 1,
                "leader": leader,
                "center": leader,
                "terminals": sorted(inst.terminals),
                "bell_pairs": tree.cost,
                "tree_edges": [list(e) for e in sorted(tree.edges)],
                "step": run.step,
            }
        )
        inst, tree = stn.remove_terminal(tree, inst, leader)
    if not rounds:
        run.begin_step()
    tail = len(run.schedule.steps[-1])
    (last,) = inst.terminals
    # wire each leader's centre to the edge qubits other leaders left at its node
    for leader in order:
        for pair, q in sorted(decor.items()):
            if leader in pair and run.state.location[q] == leader:
                run.apply(CZ(centres[leader], q))
    n_last = run.new_qubit()
    run.apply(Prepare(last, n_last))
    for pair, q in sorted(decor.items()):
        if last in pair:
            run.apply(CZ(n_last, q))
    run.schedule.outputs[last] = n_last
    return rounds, tail


def decorated_graph(node_qubits: Mapping, decorators: Mapping) -> SimpleGraph:
    """Edge-decorated complete graph: ``n_u - d_uv - n_v`` for every pair."""
    edges = []
    for (u, v), d in decorators.items():
        edges += [(node_qubits[u], d), (node_qubits[v], d)]
    return SimpleGraph.from_edges(edges, [*node_qubits.values(), *decorators.values()])


def _pack(net: Network, sched: Schedule, rounds: list, tail: int) -> tuple[Schedule, list]:
    """First-fit rounds into steps whose channel sets are disjoint; tail goes last."""
    blocks = [list(step) for step in sched.steps]
    tail_actions = blocks[-1][tail:]
    blocks[-1] = blocks[-1][:tail]
    packed: list[list[Action]] = []
    used: list[set] = []
    where = []
    for block in blocks:
        chans = {a.channel for a in block if isinstance(a, GenerateBell)}
        for i, u in enumerate(used):
            if not (u & chans):
                packed[i].extend(block)
                u |= chans
                where.append(i + 1)
                break
        else:
            packed.append(list(block))
            used.append(set(chans))
            where.append(len(packed))
    packed[-1].extend(tail_actions)
    new = Schedule(packed, dict(sched.outputs), dict(sched.decorators), set(sched.retain), sched.expected)
    for info, step in zip(rounds, where):
        info["step"] = step
    return new, rounds


def _finalise(
    net: Network, run: Network, rounds: list, tail: int, pack: bool, bounds: tuple, seed: int
) -> tuple[Schedule, CostReport]:
    run.finish()
    sched = run.schedule
    if pack and rounds:
        sched, rounds = _pack(net, sched, rounds, tail)
        from graphdist.network import execute

        execute(net, sched, seed=seed)
    n = len(net.nodes)
    report = CostReport(sched.bell_pairs, sched.time_steps, bounds[0], bounds[1], n, rounds)
    return sched, report


def distribute_edge_decorated(
    net: Network,
    terminals: Iterable,
    steiner: str = "approx",
    pack: bool = False,
    outcome: int | None = 1,
    seed: int = 0,
) -> tuple[Schedule, CostReport]:
    """Edge-decorated complete graph over ``terminals``.

    Round ``r`` distributes a star from the smallest leaf of the current
    tree; the leader is then dropped from the terminal set and the tree
    pruned.  The edge qubit of pair ``(leader, v)`` is the star leaf held at
    ``v``.
    """
    terminals = sorted(set(terminals))
    if len(terminals) < 2:
        raise ValueError("need at least two terminals")
    run = net.fresh(seed=seed)
    rounds, tail = _edge_decorated(run, terminals, steiner, outcome)
    run.schedule.expected = decorated_graph(run.schedule.outputs, run.schedule.decorators)
    n = len(net.nodes)
    return _finalise(net, run, rounds, tail, pack, (n * (n - 1) // 2, n - 1), seed)


def project_target(net: Network, target: SimpleGraph, outcome: int | None = 1) -> list[Action]:
    """Measure every edge qubit: Y where ``target`` has the edge, Z elsewhere.

    ``net`` must hold the edge-decorated graph recorded in its schedule's
    ``outputs``/``decorators``.  Appends to the current step.
    """
    sched = net.schedule
    nodes = sched.outputs
    if set(target.vertices) != set(nodes):
        raise NotDecorated("target vertices differ from the decorated node set")
    want = decorated_graph(nodes, sched.decorators)
    if net.state.graph.subgraph(want.vertices) != want or any(
        not net.state.frame[q].is_identity for q in want.vertices
    ):
        raise NotDecorated("state is not the edge-decorated complete graph")
    emitted: list[Action] = []
    for (u, v), d in sorted(sched.decorators.items()):
        basis = "Y" if target.has_edge(u, v) else "Z"
        emitted.extend(_measure(net, d, basis, outcome))
    sched.decorators = {}
    sched.expected = target.relabel(nodes)
    return emitted


# -- arbitrary graphs ----------------------------------------------------------------


def star_cover(target: SimpleGraph) -> list[tuple]:
    """Greedy edge partition into stars ``(centre, leaves)``, largest degree first."""
    remaining = set(target.edges)
    stars = []
    while remaining:
        deg: dict = {}
        for a, b in remaining:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        centre = min(deg, key=lambda v: (-deg[v], v))
        mine = sorted(e for e in remaining if centre in e)
        leaves = tuple(sorted(b if a == centre else a for a, b in mine))
        stars.append((centre, leaves))
        remaining -= set(mine)
    return stars


def _star_cover_run(run: Network, target: SimpleGraph, method: str, outcome) -> tuple[list, int]:
    held: dict = {}
    centres: dict = {}
    rounds = []
    for centre, leaves in star_cover(target):
        run.begin_step()
        qubits, cq, info = _ghz_round(run, (centre, *leaves), method, centre, outcome)
        info["round"] = len(rounds) + 1
        rounds.append(info)
        centres[centre] = cq
        for node, q in qubits.items():
            held.setdefault(node, []).append(q)
    if not rounds:
        run.begin_step()
    tail = len(run.schedule.steps[-1])
    outputs = {}
    for node in sorted(target.vertices):
        qs = held.get(node, [])
        if not qs:
            q = run.new_qubit()
            run.apply(Prepare(node, q))
            outputs[node] = q
            continue
        primary = centres.get(node, qs[0])
        for y in qs:
            if y == primary:
                continue
            if run.state.graph.degree(y) != 1:
                raise ProtocolError(f"cannot fuse qubit {y} with degree {run.state.graph.degree(y)}")
            run.apply(CZ(primary, y))
            _measure(run, y, "Y", outcome)
        outputs[node] = primary
    run.schedule.outputs = outputs
    return rounds, tail


def distribute_graph(
    net: Network,
    req: GraphRequest,
    steiner: str = "approx",
    pack: bool = False,
    outcome: int | None = 1,
    seed: int = 0,
) -> tuple[Schedule, CostReport]:
    """Graph state ``|req.target>`` with one qubit per target vertex (a network node)."""
    run = net.fresh(seed=seed)
    _instance(run, req.target.vertices)
    if req.strategy == "star_cover":
        rounds, tail = _star_cover_run(run, req.target, steiner, outcome)
        run.schedule.expected = req.target.relabel(run.schedule.outputs)
    elif len(req.target) == 1:
        run.begin_step()
        (node,) = req.target.vertices
        q = run.new_qubit()
        run.apply(Prepare(node, q))
        run.schedule.outputs = {node: q}
        run.schedule.expected = req.target.relabel(run.schedule.outputs)
        rounds, tail = [], 0
    else:
        rounds, tail = _edge_decorated(run, req.target.vertices, steiner, outcome)
        project_target(run, req.target, outcome)
    n = len(net.nodes)
    return _finalise(net, run, rounds, tail, pack, (n * (n - 1) // 2, n - 1), seed)


def compile_request(
    net: Network,
    req: GhzRequest | GraphRequest,
    steiner: str = "approx",
    pack: bool = False,
    outcome: int | None = 1,
    seed: int = 0,
) -> tuple[Schedule, CostReport]:
    if isinstance(req, GhzRequest):
        return distribute_ghz(net, req, steiner=steiner, outcome=outcome, seed=seed)
    return distribute_graph(net, req, steiner=steiner, pack=pack, outcome=outcome, seed=seed)


def expected_node_graph(req: GhzRequest | GraphRequest, sched: Schedule) -> SimpleGraph:
    """The requested final state over node ids, computed from the request alone.

    For GHZ requests the centre is the requested one, or else whichever
    terminal the schedule placed at the centre.
    """
    if isinstance(req, GraphRequest):
        return req.target
    centre = req.center
    if centre is None:
        inv = {q: n for n, q in sched.outputs.items()}
        hubs = [inv[q] for q in sched.expected.vertices if sched.expected.degree(q) == len(req.terminals) - 1]
        centre = min(hubs)
    return gc.star_graph(centre, [t for t in req.terminals if t != centre])
