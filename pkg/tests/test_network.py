import json

import pytest

from graphdist import clifford as C
from graphdist import graph_core as gc
from graphdist import network as nw
from graphdist import stabilizer as st
from graphdist.network import (
    CZ,
    Correct,
    GenerateBell,
    LocalComplement,
    MeasureY,
    MeasureZ,
    Prepare,
    Schedule,
    execute,
    load_network,
    verify_schedule,
)


def _line(n):
    ids = [f"n{i}" for i in range(n)]
    return load_network({"nodes": [{"id": i} for i in ids], "channels": list(zip(ids, ids[1:]))}), ids


def _y_with_fixes(net_state_graph, q):
    """MeasureY on q plus the conditional corrections for its neighbours."""
    acts = [MeasureY(q)]
    plus = gc.measurement_byproduct(net_state_graph, q, "Y", 1)
    minus = gc.measurement_byproduct(net_state_graph, q, "Y", -1)
    for n in sorted(plus):
        acts.append(Correct(n, plus[n].inverse(), minus[n].inverse(), q))
    return acts


def test_load_network_validation():
    net = load_network('{"nodes":[{"id":"A"},{"id":"B"}],"channels":[["A","B"]]}')
    assert net.channels == (("A", "B"),) and net.step == 0 and len(net.state.graph) == 0
    with pytest.raises(nw.DuplicateNode):
        load_network({"nodes": ["A", "A"], "channels": []})
    with pytest.raises(nw.SelfLoopChannel):
        load_network({"nodes": ["A"], "channels": [["A", "A"]]})
    with pytest.raises(nw.MalformedNetwork):
        load_network({"nodes": ["A"], "channels": [["A", "B"]]})
    with pytest.raises(nw.MalformedNetwork):
        load_network("{not json")
    assert json.loads(net.to_json()) == {"channels": [["A", "B"]], "nodes": [{"id": "A"}, {"id": "B"}]}


def test_one_pair_per_channel_per_step():
    net, _ = _line(2)
    net = net.fresh()
    net.begin_step()
    net.apply(GenerateBell(("n0", "n1"), (0, 1)))
    assert net.state.graph.sorted_edges() == [(0, 1)]
    with pytest.raises(nw.ChannelExhausted):
        net.apply(GenerateBell(("n1", "n0"), (2, 3)))
    net.begin_step()
    net.apply(GenerateBell(("n1", "n0"), (2, 3)))
    with pytest.raises(nw.UnknownChannel):
        net.apply(GenerateBell(("n0", "zz"), (4, 5)))


def test_illegal_operations():
    net, _ = _line(3)
    run = net.fresh()
    with pytest.raises(nw.ScheduleError):
        run.apply(Prepare("n0", 0))
    run.begin_step()
    run.apply(GenerateBell(("n0", "n1"), (0, 1)))
    run.apply(GenerateBell(("n1", "n2"), (2, 3)))
    with pytest.raises(nw.NonLocalOperation):
        run.apply(CZ(0, 1))
    with pytest.raises(nw.QubitReuse):
        run.apply(Prepare("n0", 1))
    with pytest.raises(nw.DeadQubit):
        run.apply(MeasureZ(99))
    run.apply(MeasureY(1))
    # 0 and 2 now carry byproducts: touching them before correcting is refused
    with pytest.raises(nw.FrameError):
        run.apply(LocalComplement(0))
    with pytest.raises(nw.ScheduleError):
        Correct(0, C.I, C.Z, measured=42).choose({})


@pytest.mark.parametrize("repeaters", range(0, 7))
def test_repeater_line_gives_bell_pair(repeaters):
    n = repeaters + 2
    net, ids = _line(n)
    run = net.fresh(verify=True)
    run.begin_step()
    pairs = []
    for i in range(n - 1):
        q = (run.new_qubit(), run.new_qubit())
        run.apply(GenerateBell((ids[i], ids[i + 1]), q))
        pairs.append(q)
    for i in range(1, n - 1):
        left, right = pairs[i - 1][1], pairs[i][0]
        run.apply(CZ(left, right))
        for q in (left, right):
            for act in _y_with_fixes(run.state.graph, q):
                run.apply(act)
    ends = (pairs[0][0], pairs[-1][1])
    run.schedule.outputs = {ids[0]: ends[0], ids[-1]: ends[1]}
    run.schedule.expected = gc.path_graph(ends)
    run.finish()
    assert run.schedule.bell_pairs == n - 1 and run.schedule.time_steps == 1
    res = verify_schedule(net, run.schedule)
    assert res.state.graph == gc.path_graph(ends)
    # sampled outcomes, all branches corrected
    for seed in range(4):
        sched = Schedule.from_json(run.schedule.to_json())
        sched.steps = [[nw.Measure(a.qubit, a.basis, None) if a.op == "measure" else a for a in s] for s in sched.steps]
        verify_schedule(net, sched, seed=seed)


def test_unused_pairs_expire_unless_persistent():
    for persistent, live in ((False, 0), (True, 2)):
        net, ids = _line(2)
        net.persistent_pairs = persistent
        sched = Schedule(steps=[[GenerateBell(("n0", "n1"), (0, 1))], []])
        res = execute(net, sched, verify=True)
        assert len(res.state.graph) == live
        assert len(res.expired) == (0 if persistent else 1)
    # retained pairs survive
    net, _ = _line(2)
    sched = Schedule(steps=[[GenerateBell(("n0", "n1"), (0, 1))]], retain={0, 1})
    assert len(execute(net, sched).state.graph) == 2


def test_counters_and_json_roundtrip():
    net, ids = _line(3)
    steps = [[GenerateBell(("n0", "n1"), (0, 1)), GenerateBell(("n1", "n2"), (2, 3))], [], [Prepare("n0", 4)]]
    sched = Schedule(steps=steps, retain={0, 1, 2, 3})
    assert sched.bell_pairs == 2 and sched.time_steps == 2
    again = Schedule.from_json(sched.to_json())
    assert again.to_json() == sched.to_json()
    bad = json.loads(sched.to_json())
    bad["counters"]["bell_pairs"] = 5
    with pytest.raises(nw.ScheduleError):
        Schedule.from_dict(bad)


def test_empty_schedule_gives_empty_state():
    net, _ = _line(2)
    res = execute(net, Schedule())
    assert len(res.state.graph) == 0 and res.bell_pairs == 0 and res.time_steps == 0


def test_capacity_is_reported_not_enforced():
    net = load_network({"nodes": [{"id": "A", "capacity": 1}, {"id": "B"}], "channels": [["A", "B"]]})
    sched = Schedule(steps=[[GenerateBell(("A", "B"), (0, 1)), Prepare("A", 2)]], retain={0, 1})
    res = execute(net, sched)
    assert res.capacity_violations == [(1, "A", 2)]


def test_verify_detects_dropped_measurement_and_budget():
    net, ids = _line(3)
    run = net.fresh()
    run.begin_step()
    run.apply(GenerateBell(("n0", "n1"), (0, 1)))
    run.apply(GenerateBell(("n1", "n2"), (2, 3)))
    run.apply(CZ(1, 2))
    for q in (1, 2):
        for act in _y_with_fixes(run.state.graph, q):
            run.apply(act)
    run.schedule.outputs = {"n0": 0, "n2": 3}
    run.schedule.expected = gc.path_graph([0, 3])
    run.finish()
    verify_schedule(net, run.schedule)
    broken = Schedule.from_json(run.schedule.to_json())
    broken.steps[0] = [a for a in broken.steps[0] if not (a.op == "measure" and a.qubit == 2)]
    broken.steps[0] = [a for a in broken.steps[0] if getattr(a, "measured", None) != 2]
    with pytest.raises(nw.VerificationError):
        verify_schedule(net, broken)
    big, ids = _line(10)
    steps = [[GenerateBell((ids[i], ids[i + 1]), (2 * i, 2 * i + 1)) for i in range(9)]]
    with pytest.raises(st.OracleBudgetExceeded):
        execute(big, Schedule(steps=steps, retain=set(range(18))), verify=True)


def test_oracle_catches_tracking_divergence():
    net, _ = _line(2)
    run = net.fresh(verify=True)
    run.begin_step()
    run.apply(GenerateBell(("n0", "n1"), (0, 1)))
    # corrupt the tracked state behind the executor's back
    run.state = nw.EntanglementState(gc.SimpleGraph(frozenset({0, 1})), run.state.frame, run.state.location)
    with pytest.raises(nw.VerificationError):
        run.check_against_oracle()
