"""Instances, edge weights and neighbor lists.

Builds a small instance in the CVRPLIB text format, parses it, and inspects
the derived data the solver works with.
"""

import numpy as np

from cvrpils import (build_neighbor_lists, edge_weight, format_instance,
                     parse_instance, shipped_bks)

# a 12-customer instance written the way benchmark files are
rng = np.random.default_rng(7)
lines = ["NAME : demo12", "TYPE : CVRP", "DIMENSION : 13",
         "EDGE_WEIGHT_TYPE : EUC_2D", "CAPACITY : 30", "NODE_COORD_SECTION",
         "1 50 50"]
for i in range(12):
    x, y = rng.integers(0, 100, size=2)
    lines.append(f"{i + 2} {x} {y}")
lines += ["DEMAND_SECTION", "1 0"] + [f"{i + 2} {rng.integers(1, 10)}" for i in range(12)]
lines += ["DEPOT_SECTION", "1", "-1", "EOF"]
text = "\n".join(lines)

inst = parse_instance(text)
print(f"parsed {inst.name}: n={inst.n} customers, capacity={inst.capacity}")
print(f"depot at {inst.coords[0]}, total demand {inst.demand.sum()}")

# edge weights are Euclidean distances rounded half-up, computed on demand
print("\nedge weights from the depot:", [edge_weight(inst, 0, v) for v in range(1, 6)], "...")
print("symmetric:", edge_weight(inst, 3, 9) == edge_weight(inst, 9, 3))

# each vertex knows its nearest customers; moves are only evaluated there
nl = build_neighbor_lists(inst, phi=5)
for v in (0, 1, 2):
    nbrs = nl.neighbors(v).tolist()
    dists = [edge_weight(inst, v, u) for u in nbrs]
    print(f"vertex {v}: 5 nearest customers {nbrs} at distances {dists}")

# the canonical re-emission round-trips exactly
assert parse_instance(format_instance(inst)).coords.tolist() == inst.coords.tolist()
print("\ncanonical re-emission round-trips")

# best-known values for the public benchmark sets ship with the package
bks = shipped_bks()
print(f"\nshipped registry holds {len(bks)} instances, e.g. X-n101-k25 -> {bks['X-n101-k25']}")
