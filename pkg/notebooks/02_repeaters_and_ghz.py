"""
Bell pairs across repeaters and GHZ states over Steiner trees
=============================================================

A network is a set of nodes joined by channels; every channel can make one
Bell pair per time step and only qubits in the same node may interact.
This script builds an end-to-end Bell pair through a repeater line, then a
GHZ state over a subset of a grid in a single time step.
"""

from graphdist import protocols as P
from graphdist import steiner as stn
from graphdist import topologies as topo
from graphdist.network import verify_schedule

# --- Repeater line ----------------------------------------------------------
# Five nodes in a row.  Each link makes a Bell pair; each of the three inner
# nodes joins its two halves with a CZ and measures both qubits in Y.
line = topo.line(5)
ids = sorted(line.vertices)
net = topo.network_from_graph(line)
sched, cost = P.distribute_bell_repeater(net, ids[0], ids[-1])
print("repeater: Bell pairs", cost.bell_pairs, "time steps", cost.time_steps)
for action in sched.actions[:8]:
    print("   ", action.to_dict())
print("    ...")

# The oracle replays the schedule on a stabilizer tableau and checks that
# exactly one Bell pair between the end nodes is left, with nothing pending.
res = verify_schedule(net, sched)
print("final node graph:", res.state.node_graph(sched.outputs).sorted_edges())

# --- GHZ on a grid ------------------------------------------------------------
grid = topo.grid(9)
gids = sorted(grid.vertices)
net = topo.network_from_graph(grid)
terminals = (gids[0], gids[2], gids[4], gids[8])

# The route is a Steiner tree: approximate (ratio <= 2) or exact (small cases).
inst = stn.SteinerInstance(grid, terminals)
approx, exact = stn.steiner_approx(inst), stn.steiner_exact(inst)
print("Steiner tree sizes: approx", approx.cost, "exact", exact.cost)
print(stn.tree_to_dot(inst, approx, name="route"))

# The star grows out from one leaf of the tree, node by node, consuming one
# Bell pair per tree edge, all within a single time step.
req = P.GhzRequest(terminals, center=gids[4])
sched, cost = P.distribute_ghz(net, req)
print("GHZ: Bell pairs", cost.bell_pairs, "time steps", cost.time_steps)
res = verify_schedule(net, sched)
print("final node graph:", res.state.node_graph(sched.outputs).sorted_edges())

# Outcomes can also be sampled; the schedule carries corrections for both
# outcomes of every measurement, so the result is the same.
sched, _ = P.distribute_ghz(net, req, outcome=None, seed=11)
res = verify_schedule(net, sched, seed=11)
print("sampled outcomes:", sorted(res.outcomes.values()).count(-1), "of", len(res.outcomes), "were -1")
