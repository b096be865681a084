"""
Arbitrary graph states: decorated complete graphs versus star covers
====================================================================

Two ways to build any graph state over a set of nodes:

* decorated: build the complete graph with one extra qubit on every edge,
  then measure each edge qubit in Y (keep the edge) or Z (drop it);
* star_cover: split the target's edges into stars, distribute each as a GHZ
  state and fuse the copies held by each node.
"""

from graphdist import graph_core as gc
from graphdist import protocols as P
from graphdist import topologies as topo
from graphdist.network import verify_schedule

ring = topo.ring(5)
ids = sorted(ring.vertices)
net = topo.network_from_graph(ring)

# Target: a 5-cycle with one chord.
target = gc.SimpleGraph.from_edges(
    [(ids[0], ids[1]), (ids[1], ids[2]), (ids[2], ids[3]), (ids[3], ids[4]), (ids[4], ids[0]), (ids[0], ids[2])]
)
print("target:", target.sorted_edges())
print("star cover:", P.star_cover(target))

for strategy in P.STRATEGIES:
    for pack in (False, True):
        sched, cost = P.distribute_graph(net, P.GraphRequest(target, strategy), pack=pack)
        res = verify_schedule(net, sched)
        ok = res.state.node_graph(sched.outputs) == target
        print(
            f"{strategy:10s} pack={pack!s:5s}  EPR={cost.bell_pairs:3d}  T={cost.time_steps}  "
            f"bounds=({cost.bound_bell}, {cost.bound_steps})  exact={ok}  peak qubits={res.peak_qubits}"
        )

# The mirror-pair matching on a line forces long routes: every pair must
# cross the middle.  Compare with 2 * floor(N/2)^2 pairs and 2 * floor(N/2) steps.
print()
print(" N  pairing-sum  bound   decorated(EPR,T)   star_cover(EPR,T)")
for n in range(4, 13):
    line_net = topo.network_from_graph(topo.line(n))
    t = topo.pathological_target(n)
    costs = [P.distribute_graph(line_net, P.GraphRequest(t, s))[1] for s in P.STRATEGIES]
    half = n // 2
    print(
        f"{n:2d}  {topo.pathological_pairs(n):11d}  {2 * half * half:5d}   "
        f"{(costs[0].bell_pairs, costs[0].time_steps)!s:17s}  {(costs[1].bell_pairs, costs[1].time_steps)!s}"
    )
