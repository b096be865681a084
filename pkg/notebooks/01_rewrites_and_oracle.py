"""
Graph rewrites and the stabilizer oracle
========================================

Graph states are handled as plain graphs.  Local complementation, Pauli
measurements and intra-node CZ gates become graph rewrites; the pending
single-qubit Cliffords those operations leave behind are kept in a frame.
This script walks through the rewrites on small examples and lets the
stabilizer simulator certify each one.
"""

from graphdist import clifford as C
from graphdist import graph_core as gc
from graphdist import stabilizer as st

# A star on four vertices: centre 0, leaves 1..3.
star = gc.star_graph(0, [1, 2, 3])
print("star edges:           ", star.sorted_edges())

# Local complementation at the centre toggles every pair of neighbours,
# so the star becomes the complete graph (both are GHZ-type states).
print("LC(0):                ", gc.local_complement(star, 0).sorted_edges())

# Measuring a vertex in Y is LC followed by deletion; in Z it is deletion.
path = gc.path_graph([0, 1, 2])
print("Y-measure middle of path:", gc.y_measure_rewrite(path, 1).sorted_edges())
print("Z-measure middle of path:", gc.z_measure_rewrite(path, 1).sorted_edges())

# Measurements leave byproducts on the former neighbours.  These are the
# Cliffords B with (post-measurement state) = B |G'>; undoing them needs B^-1.
for basis in "YZ":
    for outcome in (1, -1):
        b = gc.measurement_byproduct(path, 1, basis, outcome)
        print(f"{basis} outcome {outcome:+d}: byproducts", {q: c.name for q, c in b.items()})

# The oracle runs the physical operation on a stabilizer tableau, in every
# outcome branch, and searches for single-qubit corrections on the affected
# neighbourhood that produce the rewritten graph state exactly.
for op in [("lc", 0), ("y", 1), ("z", 1), ("toggle", 1, 2)]:
    print(op, "certified:", st.verify_rewrite(star, op))

# A wrong claim is rejected: a Y-measurement does not act like deletion.
print("Y claimed as Z rewrite:", st.verify_rewrite(star, ("y", 0), gc.z_measure_rewrite(star, 0)))

# The star is GHZ up to Hadamards on the leaves: check the GHZ stabilizers.
t = st.tableau_from_graph(star)
for leaf in (1, 2, 3):
    t = st.apply_local_clifford(t, leaf, C.H)
print("XXXX stabilizes:", t.pauli_sign({q: "X" for q in range(4)}) == 1)
print("Z0Z1 stabilizes:", t.pauli_sign({0: "Z", 1: "Z"}) == 1)
