"""Physical network model and schedule execution.

A :class:`Network` is a fixed topology of nodes and channels together with
the running entanglement state.  Each channel yields at most one Bell pair
per time step.  Only qubits that sit in the same node may interact through
CZ; every other multi-node correlation has to come from Bell pairs.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from graphdist import graph_core as gc
from graphdist import stabilizer as st
from graphdist.clifford import Clifford1
from graphdist.graph_core import LocalCliffordFrame, SimpleGraph


class NetworkError(Exception):
    pass


class MalformedNetwork(NetworkError):
    pass


class DuplicateNode(MalformedNetwork):
    pass


class SelfLoopChannel(MalformedNetwork):
    pass


class ScheduleError(NetworkError):
    pass


class UnknownChannel(ScheduleError):
    pass


class ChannelExhausted(ScheduleError):
    pass


class NonLocalOperation(ScheduleError):
    pass


class DeadQubit(ScheduleError):
    pass


class QubitReuse(ScheduleError):
    pass


class FrameError(ScheduleError):
    """An operation hit a qubit that still carries an uncorrected byproduct."""


class VerificationError(NetworkError):
    pass


# -- actions -------------------------------------------------------------------


@dataclass(frozen=True)
class Action:
    op: ClassVar[str] = ""

    @property
    def qubits(self) -> tuple:
        return ()

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class GenerateBell(Action):
    """One use of a channel: qubits[0] lands at channel[0], qubits[1] at channel[1]."""

    op: ClassVar[str] = "bell"
    channel: tuple
    pair: tuple

    def __post_init__(self) -> None:
        a, b = self.channel
        qa, qb = self.pair
        if b < a:
            object.__setattr__(self, "channel", (b, a))
            object.__setattr__(self, "pair", (qb, qa))
        else:
            object.__setattr__(self, "channel", (a, b))
            object.__setattr__(self, "pair", (qa, qb))

    @property
    def qubits(self) -> tuple:
        return self.pair

    def to_dict(self) -> dict:
        return {"op": self.op, "channel": list(self.channel), "qubits": list(self.pair)}


@dataclass(frozen=True)
class Prepare(Action):
    op: ClassVar[str] = "prepare"
    node: str
    qubit: int

    @property
    def qubits(self) -> tuple:
        return (self.qubit,)

    def to_dict(self) -> dict:
        return {"op": self.op, "node": self.node, "qubit": self.qubit}


@dataclass(frozen=True)
class CZ(Action):
    op: ClassVar[str] = "cz"
    a: int
    b: int

    @property
    def qubits(self) -> tuple:
        return (self.a, self.b)

    def to_dict(self) -> dict:
        return {"op": self.op, "qubits": [self.a, self.b]}


@dataclass(frozen=True)
class LocalComplement(Action):
    """The local-complementation unitary on ``qubit`` and its current neighbours."""

    op: ClassVar[str] = "lc"
    qubit: int

    @property
    def qubits(self) -> tuple:
        return (self.qubit,)

    def to_dict(self) -> dict:
        return {"op": self.op, "qubit": self.qubit}


@dataclass(frozen=True)
class Measure(Action):
    """Destructive Pauli measurement; ``outcome`` None means sample it."""

    op: ClassVar[str] = "measure"
    qubit: int
    basis: str
    outcome: int | None = 1

    def __post_init__(self) -> None:
        if self.basis not in ("Y", "Z"):
            raise ScheduleError(f"unsupported measurement basis {self.basis!r}")
        if self.outcome not in (None, 1, -1):
            raise ScheduleError(f"bad forced outcome {self.outcome!r}")

    @property
    def qubits(self) -> tuple:
        return (self.qubit,)

    def to_dict(self) -> dict:
        return {"op": self.op, "qubit": self.qubit, "basis": self.basis, "outcome": self.outcome}


def MeasureZ(qubit: int, outcome: int | None = 1) -> Measure:
    return Measure(qubit, "Z", outcome)


def MeasureY(qubit: int, outcome: int | None = 1) -> Measure:
    return Measure(qubit, "Y", outcome)


@dataclass(frozen=True)
class Correct(Action):
    """Single-qubit Clifford, optionally conditioned on an earlier outcome."""

    op: ClassVar[str] = "correct"
    qubit: int
    if_plus: Clifford1
    if_minus: Clifford1 | None = None
    measured: int | None = None

    @property
    def qubits(self) -> tuple:
        return (self.qubit,)

    def choose(self, outcomes: Mapping) -> Clifford1:
        if self.measured is None:
            return self.if_plus
        try:
            outcome = outcomes[self.measured]
        except KeyError:
            raise ScheduleError(f"correction depends on unmeasured qubit {self.measured}") from None
        return self.if_plus if outcome == 1 else self.if_minus

    def to_dict(self) -> dict:
        if self.measured is None:
            return {"op": self.op, "qubit": self.qubit, "clifford": self.if_plus.name}
        return {
            "op": self.op,
            "qubit": self.qubit,
            "measured": self.measured,
            "if_plus": self.if_plus.name,
            "if_minus": self.if_minus.name,
        }


def action_from_dict(d: Mapping) -> Action:
    try:
        op = d["op"]
        if op == "bell":
            return GenerateBell(tuple(d["channel"]), tuple(d["qubits"]))
        if op == "prepare":
            return Prepare(d["node"], int(d["qubit"]))
        if op == "cz":
            a, b = d["qubits"]
            return CZ(int(a), int(b))
        if op == "lc":
            return LocalComplement(int(d["qubit"]))
        if op == "measure":
            return Measure(int(d["qubit"]), d["basis"], d.get("outcome", 1))
        if op == "correct":
            if "clifford" in d:
                return Correct(int(d["qubit"]), Clifford1.from_name(d["clifford"]))
            return Correct(
                int(d["qubit"]),
                Clifford1.from_name(d["if_plus"]),
                Clifford1.from_name(d["if_minus"]),
                int(d["measured"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScheduleError(f"malformed action {dict(d)!r}: {exc}") from exc
    raise ScheduleError(f"unknown action {op!r}")


# -- schedule --------------------------------------------------------------------------


@dataclass
class Schedule:
    """Time-step-ordered actions plus a description of the intended result.

    ``outputs`` maps each participating node to the qubit it ends up holding;
    ``decorators`` maps node pairs to edge qubits (edge-decorated states
    only); ``retain`` lists Bell-pair qubits deliberately kept in memory past
    their step; ``expected`` is the intended final graph over output qubits.
    """

    steps: list[list[Action]] = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    decorators: dict = field(default_factory=dict)
    retain: set = field(default_factory=set)
    expected: SimpleGraph | None = None

    @property
    def actions(self) -> list[Action]:
        return [a for step in self.steps for a in step]

    @property
    def bell_pairs(self) -> int:
        return sum(isinstance(a, GenerateBell) for a in self.actions)

    @property
    def time_steps(self) -> int:
        return sum(1 for step in self.steps if step)

    def final_qubits(self) -> set:
        return set(self.outputs.values()) | set(self.decorators.values())

    def to_dict(self) -> dict:
        out = {
            "steps": [[a.to_dict() for a in step] for step in self.steps],
            "outputs": {k: self.outputs[k] for k in sorted(self.outputs)},
            "decorators": [[u, v, q] for (u, v), q in sorted(self.decorators.items())],
            "retain": sorted(self.retain),
            "expected": self.expected.to_dict() if self.expected is not None else None,
            "counters": {"bell_pairs": self.bell_pairs, "time_steps": self.time_steps},
        }
        return out

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> Schedule:
        try:
            sched = cls(
                steps=[[action_from_dict(a) for a in step] for step in d["steps"]],
                outputs={str(k): int(v) for k, v in d.get("outputs", {}).items()},
                decorators={(u, v): int(q) for u, v, q in d.get("decorators", [])},
                retain={int(q) for q in d.get("retain", [])},
                expected=SimpleGraph.from_dict(d["expected"]) if d.get("expected") else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ScheduleError):
                raise
            raise ScheduleError(f"malformed schedule: {exc}") from exc
        counters = d.get("counters")
        if counters and (
            counters.get("bell_pairs") != sched.bell_pairs
            or counters.get("time_steps") != sched.time_steps
        ):
            raise ScheduleError("schedule counters do not match its actions")
        return sched

    @classmethod
    def from_json(cls, text: str) -> Schedule:
        return cls.from_dict(json.loads(text))


# -- topology --------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    id: str
    capacity: int | None = None


@dataclass(frozen=True)
class EntanglementState:
    """Live qubits as a graph state plus pending local Cliffords and locations."""

    graph: SimpleGraph = SimpleGraph()
    frame: LocalCliffordFrame = LocalCliffordFrame()
    location: Mapping = field(default_factory=dict)

    def qubits_at(self, node: str) -> list[int]:
        return sorted(q for q, n in self.location.items() if n == node)

    def node_graph(self, outputs: Mapping) -> SimpleGraph:
        """The graph restricted to ``outputs`` (node -> qubit), relabelled by node."""
        inv = {q: n for n, q in outputs.items()}
        return self.graph.subgraph(inv).relabel(inv)

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "frame": self.frame.to_dict(),
            "location": {str(q): self.location[q] for q in sorted(self.location)},
        }


@dataclass
class ExecutionResult:
    state: EntanglementState
    bell_pairs: int
    time_steps: int
    outcomes: dict
    peak_qubits: int
    capacity_violations: list
    expired: list
    tableau: st.StabilizerTableau | None = None


class Network:
    """Topology plus the per-run entanglement state and channel inventory."""

    def __init__(
        self,
        nodes: Iterable[Node],
        channels: Iterable[tuple],
        persistent_pairs: bool = False,
    ) -> None:
        self.nodes: dict[str, Node] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise DuplicateNode(f"node {node.id!r} listed twice")
            self.nodes[node.id] = node
        chans = set()
        for a, b in channels:
            if a == b:
                raise SelfLoopChannel(f"channel from {a!r} to itself")
            for end in (a, b):
                if end not in self.nodes:
                    raise MalformedNetwork(f"channel endpoint {end!r} is not a node")
            chans.add(gc._edge(a, b))
        self.channels: tuple = tuple(sorted(chans))
        self.graph = SimpleGraph(frozenset(self.nodes), frozenset(self.channels))
        self.persistent_pairs = persistent_pairs
        self._reset()

    def _reset(self) -> None:
        self.step = 0
        self.state = EntanglementState()
        self.used_channels: set = set()
        self.used_ids: set = set()
        self._next_id = 0
        self.outcomes: dict = {}
        self.schedule = Schedule()
        self.fresh_pairs: dict = {}
        self.touched: set = set()
        self.peak_qubits = 0
        self.capacity_violations: list = []
        self.expired: list = []
        self.tableau: st.StabilizerTableau | None = None
        self.rng = np.random.default_rng(0)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping, persistent_pairs: bool = False) -> Network:
        try:
            nodes = []
            for n in data["nodes"]:
                if isinstance(n, str):
                    nodes.append(Node(n))
                else:
                    nodes.append(Node(str(n["id"]), n.get("capacity")))
            channels = [tuple(c) for c in data["channels"]]
            if any(len(c) != 2 for c in channels):
                raise MalformedNetwork("each channel needs exactly two endpoints")
        except (KeyError, TypeError) as exc:
            raise MalformedNetwork(f"malformed network description: {exc}") from exc
        return cls(nodes, channels, persistent_pairs=persistent_pairs)

    def to_dict(self) -> dict:
        nodes = []
        for nid in sorted(self.nodes):
            entry = {"id": nid}
            if self.nodes[nid].capacity is not None:
                entry["capacity"] = self.nodes[nid].capacity
            nodes.append(entry)
        return {"nodes": nodes, "channels": [list(c) for c in self.channels]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def fresh(self, seed: int = 0, verify: bool = False) -> Network:
        """Same topology, empty state, step counter 0."""
        net = Network.__new__(Network)
        net.nodes = self.nodes
        net.channels = self.channels
        net.graph = self.graph
        net.persistent_pairs = self.persistent_pairs
        net._reset()
        net.rng = np.random.default_rng(seed)
        if verify:
            net.tableau = st.empty_tableau()
        return net

    def __repr__(self) -> str:
        return f"Network(nodes={len(self.nodes)}, channels={len(self.channels)}, step={self.step})"

    # -- stepping ------------------------------------------------------------

    def begin_step(self) -> Network:
        """Close the current step (expiring unused pairs) and open the next."""
        self._close_step()
        self.step += 1
        self.used_channels = set()
        self.schedule.steps.append([])
        return self

    def _close_step(self) -> None:
        if self.step == 0:
            return
        keep = self.schedule.final_qubits() | self.schedule.retain
        for pair, channel in sorted(self.fresh_pairs.items()):
            if self.persistent_pairs or set(pair) & (self.touched | keep):
                continue
            if all(q in self.state.location for q in pair):
                for q in pair:
                    self._discard(q)
                self.expired.append((self.step, channel, pair))
        self.fresh_pairs = {}
        self.touched = set()
        if self.tableau is not None:
            self.check_against_oracle()

    def finish(self) -> Network:
        self._close_step()
        return self

    def new_qubit(self) -> int:
        """Reserve the next unused qubit id (ids are never reused)."""
        q = self._next_id
        self._next_id += 1
        return q

    # -- actions --------------------------------------------------------------

    def apply(self, action: Action) -> Action:
        """Validate and perform one action, recording it in ``self.schedule``."""
        if self.step == 0:
            raise ScheduleError("begin_step() must be called before acting")
        handler = getattr(self, f"_do_{action.op}")
        handler(action)
        self.schedule.steps[-1].append(action)
        live = len(self.state.graph)
        self.peak_qubits = max(self.peak_qubits, live)
        if self.tableau is not None and live > st.MAX_QUBITS:
            raise st.OracleBudgetExceeded(
                f"{live} live qubits exceed the {st.MAX_QUBITS}-qubit oracle"
            )
        self._check_capacity()
        return action

    def _check_capacity(self) -> None:
        counts: dict = {}
        for node in self.state.location.values():
            counts[node] = counts.get(node, 0) + 1
        for node, count in counts.items():
            cap = self.nodes[node].capacity
            if cap is not None and count > cap:
                self.capacity_violations.append((self.step, node, count))

    def _fresh(self, q: int) -> None:
        if q in self.used_ids:
            raise QubitReuse(f"qubit id {q} already used")

    def _live(self, *qs) -> None:
        for q in qs:
            if q not in self.state.location:
                raise DeadQubit(f"qubit {q} is not live")
        self.touched.update(qs)

    def _clean(self, *qs) -> None:
        for q in qs:
            if not self.state.frame[q].is_identity:
                raise FrameError(f"qubit {q} carries pending byproduct {self.state.frame[q].name}")

    def _add_qubit(self, q: int, node: str) -> None:
        self._fresh(q)
        self.used_ids.add(q)
        self._next_id = max(self._next_id, q + 1)
        loc = dict(self.state.location)
        loc[q] = node
        self.state = EntanglementState(self.state.graph.add_vertex(q), self.state.frame, loc)
        if self.tableau is not None:
            self.tableau = st.add_plus(self.tableau, q)

    def _discard(self, q: int) -> None:
        loc = dict(self.state.location)
        del loc[q]
        self.state = EntanglementState(
            gc.delete_vertex(self.state.graph, q), self.state.frame.drop(q), loc
        )
        if self.tableau is not None:
            # expired pairs are traced out: measure in Z and forget the result
            self.tableau, _ = st.measure_pauli(self.tableau, q, "Z", rng=self.rng)

    def _do_bell(self, act: GenerateBell) -> None:
        if act.channel not in self.graph.edges:
            raise UnknownChannel(f"no channel {act.channel!r}")
        if act.channel in self.used_channels:
            raise ChannelExhausted(f"channel {act.channel!r} already used in step {self.step}")
        qa, qb = act.pair
        if qa == qb:
            raise QubitReuse("a Bell pair needs two distinct qubits")
        self.used_channels.add(act.channel)
        self._add_qubit(qa, act.channel[0])
        self._add_qubit(qb, act.channel[1])
        self._cz(qa, qb)
        self.fresh_pairs[act.pair] = act.channel

    def _do_prepare(self, act: Prepare) -> None:
        if act.node not in self.nodes:
            raise ScheduleError(f"unknown node {act.node!r}")
        self._add_qubit(act.qubit, act.node)
        self.touched.add(act.qubit)

    def _cz(self, a: int, b: int) -> None:
        s = self.state
        self.state = EntanglementState(gc.toggle_edge(s.graph, a, b), s.frame, s.location)
        if self.tableau is not None:
            self.tableau = st.apply_cz(self.tableau, a, b)

    def _do_cz(self, act: CZ) -> None:
        self._live(act.a, act.b)
        if act.a == act.b:
            raise gc.SelfLoopForbidden("CZ on a single qubit")
        loc = self.state.location
        if loc[act.a] != loc[act.b]:
            raise NonLocalOperation(
                f"CZ between qubits {act.a}@{loc[act.a]} and {act.b}@{loc[act.b]} crosses nodes"
            )
        self._clean(act.a, act.b)
        self._cz(act.a, act.b)

    def _do_lc(self, act: LocalComplement) -> None:
        self._live(act.qubit)
        s = self.state
        nb = sorted(gc.neighborhood(s.graph, act.qubit))
        self._clean(act.qubit, *nb)
        self.state = EntanglementState(gc.local_complement(s.graph, act.qubit), s.frame, s.location)
        if self.tableau is not None:
            self.tableau = st.apply_lc_unitary(self.tableau, act.qubit, nb)

    def _do_measure(self, act: Measure) -> None:
        q = act.qubit
        self._live(q)
        self._clean(q)
        outcome = act.outcome
        if outcome is None:
            outcome = 1 if self.rng.random() < 0.5 else -1
        s = self.state
        byproduct = gc.measurement_byproduct(s.graph, q, act.basis, outcome)
        rewrite = gc.y_measure_rewrite if act.basis == "Y" else gc.z_measure_rewrite
        loc = dict(s.location)
        del loc[q]
        self.state = EntanglementState(rewrite(s.graph, q), s.frame.drop(q).absorb(byproduct), loc)
        self.outcomes[q] = outcome
        if self.tableau is not None:
            self.tableau, _ = st.measure_pauli(self.tableau, q, act.basis, forced_outcome=outcome)

    def _do_correct(self, act: Correct) -> None:
        self._live(act.qubit)
        c = act.choose(self.outcomes)
        s = self.state
        self.state = EntanglementState(s.graph, s.frame.apply(act.qubit, c), s.location)
        if self.tableau is not None:
            self.tableau = st.apply_local_clifford(self.tableau, act.qubit, c)

    # -- oracle ------------------------------------------------------------------

    def check_against_oracle(self) -> None:
        """Compare the tracked graph + frame with the physically simulated tableau."""
        if self.tableau is None:
            raise VerificationError("network was not created with verify=True")
        expected = st.tableau_from_state(self.state.graph, self.state.frame)
        if not self.tableau.same_state(expected):
            raise VerificationError(f"graph tracking diverged from the oracle at step {self.step}")

    def result(self) -> ExecutionResult:
        return ExecutionResult(
            state=self.state,
            bell_pairs=self.schedule.bell_pairs,
            time_steps=self.schedule.time_steps,
            outcomes=dict(self.outcomes),
            peak_qubits=self.peak_qubits,
            capacity_violations=list(self.capacity_violations),
            expired=list(self.expired),
            tableau=self.tableau,
        )


def load_network(source: str | Mapping, persistent_pairs: bool = False) -> Network:
    """Parse the network JSON ``{"nodes": [{"id": ...}], "channels": [[a, b], ...]}``."""
    if isinstance(source, str):
        try:
            source = json.loads(source)
        except json.JSONDecodeError as exc:
            raise MalformedNetwork(f"invalid JSON: {exc}") from exc
    return Network.from_dict(source, persistent_pairs=persistent_pairs)


def begin_step(net: Network) -> Network:
    return net.begin_step()


def execute(
    net: Network,
    schedule: Schedule,
    verify: bool = False,
    seed: int = 0,
) -> ExecutionResult:
    """Replay ``schedule`` on a fresh copy of ``net``.

    With ``verify`` the run is mirrored on a stabilizer tableau and checked
    after every step; runs whose live qubit count would exceed the oracle
    ceiling raise :class:`~graphdist.stabilizer.OracleBudgetExceeded` before
    any simulation.
    """
    if verify:
        dry = _replay(net.fresh(seed=seed), schedule)
        if dry.peak_qubits > st.MAX_QUBITS:
            raise st.OracleBudgetExceeded(
                f"execution peaks at {dry.peak_qubits} live qubits (limit {st.MAX_QUBITS})"
            )
    run = _replay(net.fresh(seed=seed, verify=verify), schedule)
    return run.result()


def verify_schedule(net: Network, schedule: Schedule, seed: int = 0) -> ExecutionResult:
    """Execute under the oracle and demand the exact intended final state.

    The simulated stabilizer state must equal the graph state of
    ``schedule.expected`` on exactly the output qubits, with no pending
    local Clifford anywhere.
    """
    if schedule.expected is None:
        raise VerificationError("schedule has no expected final graph")
    res = execute(net, schedule, verify=True, seed=seed)
    if not res.state.frame.is_identity:
        raise VerificationError(f"uncorrected byproducts remain: {res.state.frame.to_dict()}")
    want = st.tableau_from_graph(schedule.expected)
    if set(res.tableau.labels) != set(schedule.expected.vertices):
        raise VerificationError("live qubits differ from the intended output qubits")
    if not res.tableau.same_state(want):
        raise VerificationError("final state differs from the intended graph state")
    return res


def _replay(run: Network, schedule: Schedule) -> Network:
    run.schedule.outputs = dict(schedule.outputs)
    run.schedule.decorators = dict(schedule.decorators)
    run.schedule.retain = set(schedule.retain)
    run.schedule.expected = schedule.expected
    for step in schedule.steps:
        run.begin_step()
        for action in step:
            run.apply(action)
    run.finish()
    return run
