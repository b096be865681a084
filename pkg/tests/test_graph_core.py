import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as hst

from graphdist import clifford as C
from graphdist import graph_core as gc
from graphdist.graph_core import LocalCliffordFrame, SimpleGraph
from oracles import DenseState


@hst.composite
def graphs(draw, max_n=7):
    n = draw(hst.integers(1, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(hst.lists(hst.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return SimpleGraph.from_edges([p for p, m in zip(pairs, mask) if m], range(n))


def test_local_complement_star_to_complete():
    star = gc.star_graph(0, [1, 2, 3])
    out = gc.local_complement(star, 0)
    assert out == gc.complete_graph(range(4))
    assert gc.local_complement(out, 0) == star


def test_y_measure_on_path_joins_ends():
    # repeater primitive: measuring the middle of a 3-path in Y links the ends
    p = gc.path_graph([0, 1, 2])
    assert gc.y_measure_rewrite(p, 1) == SimpleGraph.from_edges([(0, 2)])
    assert gc.z_measure_rewrite(p, 1) == SimpleGraph(frozenset({0, 2}))


def test_errors():
    g = gc.path_graph([0, 1])
    with pytest.raises(gc.VertexNotFound):
        gc.local_complement(g, 9)
    with pytest.raises(gc.SelfLoopForbidden):
        gc.toggle_edge(g, 0, 0)
    with pytest.raises(gc.SelfLoopForbidden):
        SimpleGraph.from_edges([(1, 1)])
    with pytest.raises(gc.GraphError):
        SimpleGraph.from_dict({"vertices": [0]})
    with pytest.raises(ValueError):
        gc.measurement_byproduct(g, 0, "Y", 0)


@given(graphs())
def test_lc_is_involution(g):
    for v in g.vertices:
        assert gc.local_complement(gc.local_complement(g, v), v) == g


@given(graphs())
def test_lc_keeps_vertex_neighbourhood(g):
    for v in g.vertices:
        assert gc.neighborhood(gc.local_complement(g, v), v) == gc.neighborhood(g, v)


@given(graphs(), hst.data())
def test_toggle_involution_and_symmetry(g, data):
    if len(g) < 2:
        return
    a, b = data.draw(hst.sampled_from(list(combinations(sorted(g.vertices), 2))))
    assert gc.toggle_edge(gc.toggle_edge(g, a, b), a, b) == g
    assert gc.toggle_edge(g, a, b) == gc.toggle_edge(g, b, a)


@given(graphs())
def test_json_roundtrip_is_canonical(g):
    text = g.to_json()
    assert SimpleGraph.from_json(text) == g
    assert SimpleGraph.from_json(text).to_json() == text
    d = json.loads(text)
    assert d["vertices"] == sorted(d["vertices"])
    assert d["edges"] == sorted(d["edges"])


@given(graphs())
def test_y_measure_equals_lc_then_delete(g):
    for v in g.vertices:
        y = gc.y_measure_rewrite(g, v)
        assert y == gc.delete_vertex(gc.local_complement(g, v), v)
        assert v not in y


def test_operations_are_pure():
    g = gc.star_graph(0, [1, 2])
    before = g.to_json()
    gc.local_complement(g, 0)
    gc.toggle_edge(g, 1, 2)
    gc.y_measure_rewrite(g, 0)
    assert g.to_json() == before


def test_dot_export():
    g = gc.path_graph(["a", "b", "c"])
    dot = g.to_dot(highlight=[("b", "a")])
    assert '"a" -- "b" [color=black, penwidth=2];' in dot
    assert '"b" -- "c" [color=grey];' in dot


def _dense_with_frame(g, frame):
    st = DenseState.graph_state(g.vertices, g.edges)
    for v in frame:
        st.apply1(v, frame[v].matrix())
    return st


@pytest.mark.parametrize("basis", ["Y", "Z"])
@pytest.mark.parametrize("outcome", [1, -1])
def test_byproduct_table_against_state_vector(basis, outcome):
    """post-measurement state == B |G'> with B from measurement_byproduct."""
    rng = np.random.default_rng(7)
    for _ in range(40):
        n = int(rng.integers(2, 7))
        g = SimpleGraph.from_edges(
            [e for e in combinations(range(n), 2) if rng.random() < 0.5], range(n)
        )
        a = int(rng.integers(n))
        st = DenseState.graph_state(g.vertices, g.edges)
        st.measure(a, basis, outcome)
        rewrite = gc.y_measure_rewrite if basis == "Y" else gc.z_measure_rewrite
        frame = LocalCliffordFrame(gc.measurement_byproduct(g, a, basis, outcome))
        assert st.equal_up_to_phase(_dense_with_frame(rewrite(g, a), frame))


def test_lc_unitary_exact_on_state_vector():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        g = SimpleGraph.from_edges(
            [e for e in combinations(range(n), 2) if rng.random() < 0.5], range(n)
        )
        a = int(rng.integers(n))
        st = DenseState.graph_state(g.vertices, g.edges)
        st.lc(a, sorted(gc.neighborhood(g, a)))
        lc = gc.local_complement(g, a)
        assert st.equal_up_to_phase(DenseState.graph_state(lc.vertices, lc.edges))


def test_frame_apply_and_absorb_order():
    f = LocalCliffordFrame().apply(0, C.H).apply(0, C.S)
    assert f[0] == C.H.then(C.S)
    g = f.absorb({0: C.Z})
    # byproduct sits under the existing frame: applied first
    assert g[0] == C.Z.then(C.H.then(C.S))
    assert LocalCliffordFrame({0: C.I}).is_identity
    assert f.drop(0).is_identity
