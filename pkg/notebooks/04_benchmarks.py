"""
Cost against the bounds across topology families
================================================

GHZ over all nodes should cost at most N-1 Bell pairs in one step; the
complete graph at most N(N-1)/2 pairs in N-1 steps.  This script prints a
table from the same routine that backs ``graphdist bench``.
"""

from graphdist import cli

rows = cli.bench_rows(["line", "ring", "grid", "random", "tree"], [4, 8, 12])
cols = ["family", "n", "request", "bell_pairs", "bound_bell", "time_steps", "bound_steps", "steiner_exact"]
print("  ".join(f"{c:>11s}" for c in cols))
for r in rows:
    print("  ".join(f"{str(r[c]):>11s}" for c in cols))

bad = [r for r in rows if not r["within_bounds"]]
print("\nrows outside the bounds:", len(bad))
