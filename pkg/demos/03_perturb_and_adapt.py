"""Perturbation heuristics and the adaptive control state.

Shows the two removal heuristics, the insertion rules with their adjacency
restriction, the degree mechanisms, and how an acceptance threshold moves.
"""

import numpy as np

from cvrpils import (AcceptanceState, DegreeState, Instance, accept,
                     build_neighbor_lists, construct_initial, local_search,
                     next_omega, observe_distance, perturb, remove_concentric,
                     remove_sequential, solution_distance, threshold, update_fbar)

rng = np.random.default_rng(11)
n = 50
inst = Instance(name="demo50", n=n,
                coords=np.vstack([[50.0, 50.0], rng.uniform(0, 100, size=(n, 2))]),
                demand=np.concatenate([[0], rng.integers(1, 10, size=n)]),
                capacity=35)
nl = build_neighbor_lists(inst, phi=20)
s = construct_initial(inst, nl, np.random.default_rng(1))
local_search(s, nl)
print(f"reference solution: cost={s.cost}")

# removal heuristics: a geographic ball versus a route-order run
probe = s.copy()
ball = remove_concentric(probe, 6, np.random.default_rng(2))
print(f"\nconcentric removal took {ball} (center {ball[0]} plus its 5 nearest)")
probe = s.copy()
run_ = remove_sequential(probe, 6, np.random.default_rng(3))
print(f"sequential removal took {run_} (consecutive along routes)")

# a full perturbation re-inserts under the adjacency restriction and repairs
for k, name in ((0, "concentric"), (1, "sequential")):
    out = perturb(s, k, 8, nl, np.random.default_rng(4))
    print(f"perturb via {name}: cost {s.cost} -> {out.cost}, "
          f"distance to reference {solution_distance(out, s)} edges")

# degree mechanisms: fixed / relative / random / distance-targeted
for mech in ("d1", "d2", "d3", "d4"):
    ds = DegreeState(mechanism=mech)
    draws = [next_omega(ds, 0, n, np.random.default_rng(5)) for _ in range(3)]
    print(f"mechanism {mech}: omega draws {draws}")

# the distance mechanism steers omega toward the target distance d_beta
ds = DegreeState(mechanism="d4", d_beta=25, gamma=30)
for _ in range(30):
    observe_distance(ds, 0, 10, n)   # too close: omega grows
print(f"\nafter a window of distance-10 observations omega[0] = {ds.omega[0]:.1f}")

# acceptance: watch the threshold track the running statistics
st = AcceptanceState(criterion="c1", gamma=30)
costs = [1000, 990, 1010, 950, 980, 1005]
for f in costs:
    update_fbar(st, f)
    verdict = accept(st, f, min(costs), 5)
    print(f"f={f}: threshold {threshold(st):8.2f} -> {'accept' if verdict else 'reject'}")
